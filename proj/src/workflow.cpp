#include "surval/workflow.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "surval/rng.hpp"

namespace surval {

namespace {

constexpr double kSmoothSchedule[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2};
constexpr int kSeedsPerSmooth = 2;

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

TrainResult train_until_valid(const std::vector<DataPoint>& data, const Bounds& bounds,
                              const TrainOptions& opts,
                              std::optional<StoreFingerprint> fingerprint) {
    opts.tolerances.validate();
    if (opts.budget < 1) throw std::invalid_argument("train: budget must be >= 1");

    const auto subset = select_fit_subset(data, opts.fit_cap, opts.keep_x);
    const bool capped = subset.size() < data.size();
    std::vector<DataPoint> fit_data;
    if (capped) {
        fit_data.reserve(subset.size());
        for (std::size_t i : subset) fit_data.push_back(data[i]);
    }
    const std::vector<DataPoint>& train_data = capped ? fit_data : data;

    // optional cost control: score candidates on an evenly strided subsample
    std::vector<DataPoint> strided;
    if (opts.report_cap > 0 && data.size() > opts.report_cap) {
        strided.reserve(opts.report_cap);
        const double step = static_cast<double>(data.size()) / opts.report_cap;
        for (std::size_t i = 0; i < opts.report_cap; ++i)
            strided.push_back(data[static_cast<std::size_t>(i * step)]);
    }
    const std::vector<DataPoint>& report_data = strided.empty() ? data : strided;

    TrainResult result;
    double best_delta = std::numeric_limits<double>::infinity();
    double persist_benchmark = opts.prior_delta;
    std::string last_error = "no fit attempted";

    const int total = static_cast<int>(std::size(kSmoothSchedule)) * kSeedsPerSmooth;
    const int attempts = std::min(opts.budget, total);
    for (int a = 0; a < attempts; ++a) {
        Hyperparams hyper;
        hyper.smooth = kSmoothSchedule[a / kSeedsPerSmooth];
        hyper.noise_sigma = opts.noise_sigma;
        hyper.noise_seed = mix_seed(opts.seed, static_cast<std::uint64_t>(a) + 1);
        TrainAttempt attempt{hyper.smooth, hyper.noise_seed, 0.0, false};
        try {
            Surrogate candidate = fit(train_data, hyper, fingerprint);
            const DistanceReport rep =
                report(candidate, report_data, opts.mode, bounds, opts.threads);
            attempt.delta = quality_delta(rep);
            if (attempt.delta < best_delta) {
                best_delta = attempt.delta;
                result.best = std::move(candidate);
                result.best_report = rep;
                result.delta = attempt.delta;
            }
            if (attempt.delta < persist_benchmark) {
                persist_benchmark = attempt.delta;
                if (opts.on_improved) opts.on_improved(result.best, attempt.delta);
            }
        } catch (const FitError& e) {
            attempt.fit_failed = true;
            last_error = e.what();
        }
        result.attempts.push_back(attempt);
        if (std::isfinite(best_delta) && train_valid(result.best_report, opts.tolerances)) {
            result.train_valid = true;
            return result;
        }
    }
    if (!std::isfinite(best_delta))
        throw TrainFailure("training failed: every candidate fit failed (last: " + last_error +
                           ")");
    result.train_valid = false;
    return result;
}

void WorkflowConfig::validate() const {
    if (model_id.empty()) throw std::invalid_argument("workflow: model id required");
    if (train_budget < 1) throw std::invalid_argument("workflow: train_budget must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("workflow: max_iterations must be >= 1");
    solver.validate();
    test_tolerances.validate();
    train_tolerances.validate();
}

std::string to_string(WorkflowTermination t) {
    switch (t) {
        case WorkflowTermination::converged: return "converged";
        case WorkflowTermination::max_iterations: return "max-iterations";
        case WorkflowTermination::train_exhausted: return "train-exhausted";
    }
    throw std::logic_error("unreachable termination");
}

std::string summary_csv(const WorkflowResult& result) {
    std::string out = "iter,new_evals,total_evals,score,delta,test_valid,new_extrema,converged\n";
    for (const auto& s : result.summaries) {
        out += std::to_string(s.iteration) + ',' + std::to_string(s.new_evals) + ',' +
               std::to_string(s.total_evals) + ',';
        append_number(out, s.score);
        out += ',';
        append_number(out, s.delta);
        out += ',';
        out += s.test_valid ? "true" : "false";
        out += ',' + std::to_string(s.new_extrema) + ',';
        out += s.converged ? "true" : "false";
        out += '\n';
    }
    return out;
}

Workflow::Workflow(Model model, WorkflowConfig config, OutputPaths paths)
    : model_(std::move(model)),
      config_(std::move(config)),
      paths_(std::move(paths)),
      bounds_(config_.bounds_override ? *config_.bounds_override : model_.spec.bounds),
      store_(model_.spec.dim),
      registry_(ExtremaRegistry::for_bounds(bounds_)) {
    config_.validate();
    if (static_cast<int>(bounds_.dim()) != model_.spec.dim)
        throw std::invalid_argument("workflow: bounds dimension mismatch");
    config_.sampler.rng_seed = config_.rng_seed;
    if (!paths_.eval_db.empty()) {
        if (std::filesystem::exists(paths_.eval_db)) {
            EvalStore loaded = EvalStore::load(paths_.eval_db);
            if (loaded.dim() != model_.spec.dim)
                throw std::invalid_argument("workflow: eval DB dimension mismatch");
            store_ = std::move(loaded);
        }
        store_.attach_file(paths_.eval_db);
    }
}

std::vector<std::vector<double>> Workflow::extrema_locations() const {
    std::vector<std::vector<double>> xs;
    xs.reserve(registry_.entries().size());
    for (const auto& e : registry_.entries()) xs.push_back(e.x);
    return xs;
}

TrainResult Workflow::train_phase(int iteration) {
    TrainOptions opts;
    opts.tolerances = config_.train_tolerances;
    opts.mode = config_.mode;
    opts.budget = config_.train_budget;
    opts.seed = mix_seed(config_.rng_seed, 0x747261696eULL, static_cast<std::uint64_t>(iteration));
    opts.fit_cap = config_.fit_cap;
    opts.report_cap = config_.report_cap;
    opts.keep_x = extrema_locations();
    opts.threads = config_.threads;
    opts.prior_delta = persisted_delta_;
    opts.on_improved = [this](const Surrogate& s, double delta) {
        persisted_delta_ = delta;
        if (!paths_.surrogate_db.empty()) {
            std::ofstream out(paths_.surrogate_db, std::ios::trunc);
            out << s.serialize();
        }
    };
    return train_until_valid(store_.query_all(), bounds_, opts, store_.fingerprint());
}

void Workflow::finalize(WorkflowResult& result) {
    result.total_evaluations = static_cast<long>(store_.size());
    if (result.surrogate && !paths_.surrogate_db.empty()) {
        std::ofstream out(paths_.surrogate_db, std::ios::trunc);
        out << result.surrogate->serialize();
    }
    if (!paths_.summary.empty()) {
        std::ofstream out(paths_.summary, std::ios::trunc);
        out << summary_csv(result);
    }
}

WorkflowResult Workflow::run_single() {
    WorkflowResult result;
    std::optional<Surrogate> current;

    // test-on-retrieval: a stored surrogate that still passes ends the run
    if (!paths_.surrogate_db.empty() && std::filesystem::exists(paths_.surrogate_db)) {
        std::ifstream in(paths_.surrogate_db);
        std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        current = Surrogate::deserialize(doc);
        if (store_.size() > 0) {
            const DistanceReport rep =
                report(*current, store_.query_all(), config_.mode, bounds_, config_.threads);
            if (test_valid(rep, config_.test_tolerances)) {
                result.surrogate = std::move(current);
                result.termination = WorkflowTermination::converged;
                finalize(result);
                return result;
            }
        }
    }

    bool last_train_ok = false;
    bool need_more_data = false;
    for (int iteration = 0; iteration < config_.max_iterations; ++iteration) {
        IterationSummary summary;
        summary.iteration = iteration;
        const std::size_t before = store_.size();
        // nothing to learn from yet, or the last candidate was rejected:
        // sample before training
        if (need_more_data || store_.size() < static_cast<std::size_t>(model_.spec.dim) + 1) {
            const SampleResult s = sample_iteration(model_, store_, config_.sampler,
                                                    config_.solver, bounds_, iteration);
            registry_.update(s.traces, iteration);
        }
        try {
            TrainResult tr = train_phase(iteration);
            last_train_ok = tr.train_valid;
            current = std::move(tr.best);
            summary.delta = tr.delta;
            summary.test_valid = test_valid(tr.best_report, config_.test_tolerances);
            summary.score = tr.best_report.ave;
        } catch (const TrainFailure&) {
            last_train_ok = false;
            summary.delta = std::numeric_limits<double>::infinity();
            summary.score = std::numeric_limits<double>::infinity();
        }
        need_more_data = true;
        summary.new_evals = static_cast<int>(store_.size() - before);
        summary.total_evals = static_cast<long>(store_.size());
        result.summaries.push_back(summary);
        if (summary.test_valid) {
            result.surrogate = std::move(current);
            result.termination = WorkflowTermination::converged;
            finalize(result);
            return result;
        }
    }
    result.surrogate = std::move(current);
    result.termination = last_train_ok ? WorkflowTermination::max_iterations
                                       : WorkflowTermination::train_exhausted;
    finalize(result);
    return result;
}

WorkflowResult Workflow::run_asymptotic() {
    WorkflowResult result;
    std::optional<Surrogate> current;
    std::vector<double> scores;
    bool last_train_ok = false;

    for (int iteration = 0; iteration < config_.max_iterations; ++iteration) {
        IterationSummary summary;
        summary.iteration = iteration;
        const std::size_t before = store_.size();
        const SampleResult sampled =
            sample_iteration(model_, store_, config_.sampler, config_.solver, bounds_, iteration);
        summary.new_evals = static_cast<int>(store_.size() - before);
        summary.new_extrema = registry_.update(sampled.traces, iteration);

        double score = std::numeric_limits<double>::infinity();
        try {
            TrainResult tr = train_phase(iteration);
            last_train_ok = tr.train_valid;
            current = std::move(tr.best);
            summary.delta = tr.delta;
            summary.test_valid = test_valid(tr.best_report, config_.test_tolerances);
            // the per-iteration score is the mean over this iteration's slice
            // of the full-report distances
            const auto records = store_.snapshot();
            if (tr.best_report.per_point.size() == records.size()) {
                double sum = 0, carry = 0;
                std::size_t count = 0;
                for (std::size_t j = 0; j < records.size(); ++j) {
                    if (records[j].iteration != iteration) continue;
                    const double t = tr.best_report.per_point[j] - carry;
                    const double next = sum + t;
                    carry = (next - sum) - t;
                    sum = next;
                    ++count;
                }
                if (count > 0) score = sum / static_cast<double>(count);
            } else {
                // report was strided; score the iteration slice directly
                score = iteration_score(*current, store_, iteration, bounds_, config_.mode,
                                        config_.threads);
            }
        } catch (const TrainFailure&) {
            last_train_ok = false;
            summary.delta = std::numeric_limits<double>::infinity();
            summary.test_valid = false;
        }
        scores.push_back(score);
        summary.score = score;
        summary.converged =
            converged(scores, registry_, config_.test_tolerances, iteration,
                      config_.sampler.directed);
        summary.total_evals = static_cast<long>(store_.size());
        result.summaries.push_back(summary);

        if (summary.test_valid && summary.converged) {
            result.surrogate = std::move(current);
            result.termination = WorkflowTermination::converged;
            result.converged_via =
                omega(registry_, iteration, config_.test_tolerances.extrema_window,
                      config_.sampler.directed)
                    ? ConvergedVia::omega
                    : ConvergedVia::tol_stop;
            finalize(result);
            return result;
        }
    }
    result.surrogate = std::move(current);
    result.termination = last_train_ok ? WorkflowTermination::max_iterations
                                       : WorkflowTermination::train_exhausted;
    finalize(result);
    return result;
}

}  // namespace surval
