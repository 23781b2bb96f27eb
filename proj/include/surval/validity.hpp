#pragma once

#include <string>
#include <vector>

#include "surval/bounds.hpp"
#include "surval/distance.hpp"
#include "surval/eval_store.hpp"
#include "surval/nelder_mead.hpp"

namespace surval {

enum class PredicateForm { ave_max, sum_max };

std::string to_string(PredicateForm f);
PredicateForm predicate_form_from_string(const std::string& s);

struct ToleranceConfig {
    PredicateForm form = PredicateForm::ave_max;
    double tol_ave = 1e-5;
    double tol_max = 1e-4;
    double tol_sum = 1e-3;
    double tol_stop = 2e-4;
    int extrema_window = 3;  // M
    int score_window = 3;    // N

    void validate() const;

    static ToleranceConfig loose();
    static ToleranceConfig strict();
    static ToleranceConfig preset(const std::string& name);
};

/// test(delta): the report's aggregates against the configured thresholds.
bool test_valid(const DistanceReport& report, const ToleranceConfig& cfg);

/// Same predicate machinery as test_valid, under the training tolerances.
bool train_valid(const DistanceReport& report, const ToleranceConfig& cfg);

/// Training quality metric: the summed per-point distance.
double quality_delta(const DistanceReport& report);

/// Mean distance from the surrogate to the data sampled in one iteration only.
double iteration_score(const Surrogate& s, const EvalStore& store, int iteration,
                       const Bounds& bounds, DistanceMode mode = DistanceMode::graphical,
                       int threads = 0);

/// Locations where some solver ran to termination, deduplicated by a
/// separation radius.
class ExtremaRegistry {
public:
    struct Entry {
        std::vector<double> x;
        double f = 0;
        int iteration = 0;
    };

    explicit ExtremaRegistry(double dedupe_radius);
    static ExtremaRegistry for_bounds(const Bounds& bounds);  // radius = 1e-3 * diagonal

    double dedupe_radius() const { return radius_; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Insert tolerance-terminated solver terminals farther than the radius
    /// from every entry; returns the number inserted.
    int update(const std::vector<SolverTrace>& traces, int iteration);

    /// Count of entries stamped inside [first, last].
    int inserted_in(int first, int last) const;

private:
    double radius_;
    std::vector<Entry> entries_;
};

/// Omega(M): no new extrema in the last M iterations. Pinned false for
/// non-directed runs and until M iterations of history exist.
bool omega(const ExtremaRegistry& registry, int current_iteration, int window, bool directed);

/// Stop condition: omega, or every score in the trailing window at or below
/// tol_stop. Iterations that have not happened yet count as unconverged.
bool converged(const std::vector<double>& scores_by_iteration, const ExtremaRegistry& registry,
               const ToleranceConfig& cfg, int current_iteration, bool directed);

}  // namespace surval
