#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "surval/distance.hpp"
#include "surval/eval_store.hpp"
#include "surval/models.hpp"
#include "surval/rbf.hpp"
#include "surval/samplers.hpp"
#include "surval/validity.hpp"

namespace surval {

class TrainFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainOptions {
    ToleranceConfig tolerances;
    DistanceMode mode = DistanceMode::graphical;
    int budget = 12;
    double noise_sigma = 1e-8;
    std::uint64_t seed = 0;
    std::size_t fit_cap = 4000;
    std::size_t report_cap = 0;  // 0 = score every stored point
    std::vector<std::vector<double>> keep_x;  // always kept when subsampling
    int threads = 0;
    /// Persist hook: called whenever a candidate beats prior_delta.
    double prior_delta = std::numeric_limits<double>::infinity();
    std::function<void(const Surrogate&, double)> on_improved;
};

struct TrainAttempt {
    double smooth = 0;
    std::uint64_t noise_seed = 0;
    double delta = 0;
    bool fit_failed = false;
};

struct TrainResult {
    Surrogate best;
    DistanceReport best_report;  // over all supplied data, under TrainOptions::mode
    double delta = 0;
    bool train_valid = false;
    std::vector<TrainAttempt> attempts;
};

/// Walk the hyperparameter schedule (smooth levels crossed with two fresh
/// noise seeds, truncated to the budget), fit each candidate, score it by the
/// summed distance over all data, and keep the argmin. Returns early once the
/// kept candidate satisfies the training predicate. Throws TrainFailure when
/// every fit fails.
TrainResult train_until_valid(const std::vector<DataPoint>& data, const Bounds& bounds,
                              const TrainOptions& opts,
                              std::optional<StoreFingerprint> fingerprint = std::nullopt);

struct WorkflowConfig {
    std::string model_id;
    SamplerConfig sampler;
    SolverConfig solver;
    ToleranceConfig test_tolerances = ToleranceConfig::loose();
    ToleranceConfig train_tolerances = ToleranceConfig::loose();
    DistanceMode mode = DistanceMode::graphical;
    int train_budget = 12;
    int max_iterations = 100;
    std::uint64_t rng_seed = 0;
    std::size_t fit_cap = 4000;
    std::size_t report_cap = 0;
    int threads = 0;
    std::optional<Bounds> bounds_override;

    void validate() const;
};

struct IterationSummary {
    int iteration = 0;
    int new_evals = 0;
    long total_evals = 0;
    double score = 0;
    double delta = 0;
    bool test_valid = false;
    int new_extrema = 0;
    bool converged = false;
};

enum class WorkflowTermination { converged, max_iterations, train_exhausted };
enum class ConvergedVia { none, omega, tol_stop };

std::string to_string(WorkflowTermination t);

struct WorkflowResult {
    std::vector<IterationSummary> summaries;
    std::optional<Surrogate> surrogate;
    WorkflowTermination termination = WorkflowTermination::max_iterations;
    ConvergedVia converged_via = ConvergedVia::none;
    long total_evaluations = 0;
};

std::string summary_csv(const WorkflowResult& result);

struct OutputPaths {
    std::string eval_db;       // empty = in-memory only
    std::string surrogate_db;  // empty = no surrogate persistence
    std::string summary;       // empty = no summary file
};

/// One run over one store. Drives sampling, training, testing, and the
/// convergence bookkeeping; persists artifacts when paths are given.
class Workflow {
public:
    Workflow(Model model, WorkflowConfig config, OutputPaths paths = {});

    /// Stop as soon as testing passes: retrieve-and-test, then alternate
    /// retraining and sampling until the test predicate holds.
    WorkflowResult run_single();

    /// Keep iterating after test passes until the stop condition holds too.
    WorkflowResult run_asymptotic();

    EvalStore& store() { return store_; }
    const Bounds& bounds() const { return bounds_; }
    const ExtremaRegistry& registry() const { return registry_; }

private:
    TrainResult train_phase(int iteration);
    void finalize(WorkflowResult& result);
    std::vector<std::vector<double>> extrema_locations() const;

    Model model_;
    WorkflowConfig config_;
    OutputPaths paths_;
    Bounds bounds_;
    EvalStore store_;
    ExtremaRegistry registry_;
    double persisted_delta_ = std::numeric_limits<double>::infinity();
};

}  // namespace surval
