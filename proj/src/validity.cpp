#include "surval/validity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace surval {

std::string to_string(PredicateForm f) {
    return f == PredicateForm::ave_max ? "ave-max" : "sum-max";
}

PredicateForm predicate_form_from_string(const std::string& s) {
    if (s == "ave-max") return PredicateForm::ave_max;
    if (s == "sum-max") return PredicateForm::sum_max;
    throw std::invalid_argument("unknown predicate form: " + s);
}

void ToleranceConfig::validate() const {
    if (tol_ave <= 0 || tol_max <= 0 || tol_sum <= 0 || tol_stop <= 0)
        throw std::invalid_argument("tolerances must be > 0");
    if (extrema_window < 1 || score_window < 1)
        throw std::invalid_argument("window sizes must be >= 1");
}

ToleranceConfig ToleranceConfig::loose() {
    ToleranceConfig c;
    c.tol_ave = 1e-5;
    c.tol_max = 1e-4;
    c.tol_stop = 2e-4;
    return c;
}

ToleranceConfig ToleranceConfig::strict() {
    ToleranceConfig c;
    c.tol_ave = 1e-7;
    c.tol_max = 1e-6;
    c.tol_stop = 2e-6;
    return c;
}

ToleranceConfig ToleranceConfig::preset(const std::string& name) {
    if (name == "loose") return loose();
    if (name == "strict") return strict();
    throw std::invalid_argument("unknown tolerance preset: " + name);
}

bool test_valid(const DistanceReport& report, const ToleranceConfig& cfg) {
    if (report.per_point.empty()) throw std::invalid_argument("test_valid: empty report");
    if (cfg.form == PredicateForm::ave_max)
        return report.ave <= cfg.tol_ave && report.max <= cfg.tol_max;
    return report.sum <= cfg.tol_sum && report.max <= cfg.tol_max;
}

bool train_valid(const DistanceReport& report, const ToleranceConfig& cfg) {
    return test_valid(report, cfg);
}

double quality_delta(const DistanceReport& report) { return report.sum; }

double iteration_score(const Surrogate& s, const EvalStore& store, int iteration,
                       const Bounds& bounds, DistanceMode mode, int threads) {
    const auto data = store.query_iteration(iteration);
    if (data.empty())
        throw std::invalid_argument("iteration_score: no data for iteration " +
                                    std::to_string(iteration));
    return report(s, data, mode, bounds, threads).ave;
}

ExtremaRegistry::ExtremaRegistry(double dedupe_radius) : radius_(dedupe_radius) {
    if (dedupe_radius <= 0) throw std::invalid_argument("dedupe radius must be > 0");
}

ExtremaRegistry ExtremaRegistry::for_bounds(const Bounds& bounds) {
    return ExtremaRegistry(1e-3 * bounds.diagonal());
}

int ExtremaRegistry::update(const std::vector<SolverTrace>& traces, int iteration) {
    int inserted = 0;
    for (const auto& t : traces) {
        if (t.terminated_by != Termination::tolerance) continue;
        bool fresh = true;
        for (const auto& e : entries_) {
            if (euclidean_distance(t.x_best, e.x) <= radius_) {
                fresh = false;
                break;
            }
        }
        if (fresh) {
            entries_.push_back({t.x_best, t.f_best, iteration});
            ++inserted;
        }
    }
    return inserted;
}

int ExtremaRegistry::inserted_in(int first, int last) const {
    int n = 0;
    for (const auto& e : entries_)
        if (e.iteration >= first && e.iteration <= last) ++n;
    return n;
}

bool omega(const ExtremaRegistry& registry, int current_iteration, int window, bool directed) {
    if (!directed) return false;
    if (current_iteration + 1 < window) return false;  // insufficient history
    return registry.inserted_in(current_iteration - window + 1, current_iteration) == 0;
}

bool converged(const std::vector<double>& scores_by_iteration, const ExtremaRegistry& registry,
               const ToleranceConfig& cfg, int current_iteration, bool directed) {
    if (current_iteration < 0) throw std::invalid_argument("converged: needs an iteration");
    if (omega(registry, current_iteration, cfg.extrema_window, directed)) return true;
    double worst = 0;
    for (int j = current_iteration - cfg.score_window + 1; j <= current_iteration; ++j) {
        const double score = (j >= 0 && j < static_cast<int>(scores_by_iteration.size()))
                                 ? scores_by_iteration[static_cast<std::size_t>(j)]
                                 : std::numeric_limits<double>::infinity();
        worst = std::max(worst, score);
    }
    return worst <= cfg.tol_stop;
}

}  // namespace surval
