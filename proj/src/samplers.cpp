#include "surval/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "surval/rng.hpp"

namespace surval {

std::string to_string(SamplingStrategy s) {
    switch (s) {
        case SamplingStrategy::random: return "random";
        case SamplingStrategy::lattice: return "lattice";
        case SamplingStrategy::sparsity: return "sparsity";
    }
    throw std::logic_error("unreachable strategy");
}

SamplingStrategy strategy_from_string(const std::string& s) {
    if (s == "random") return SamplingStrategy::random;
    if (s == "lattice") return SamplingStrategy::lattice;
    if (s == "sparsity") return SamplingStrategy::sparsity;
    throw std::invalid_argument("unknown sampling strategy: " + s);
}

void SamplerConfig::validate(int dim) const {
    if (ensemble_size < 1) throw std::invalid_argument("sampler: n_s must be >= 1");
    if (warm < 1) throw std::invalid_argument("sampler: warm must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("sampler: batch_size must be >= 1");
    if (!lattice_bins.empty()) {
        if (strategy != SamplingStrategy::lattice)
            throw std::invalid_argument("sampler: bins tuple is only valid for lattice");
        if (static_cast<int>(lattice_bins.size()) != dim)
            throw std::invalid_argument("sampler: bins tuple length must equal model dim");
        for (int b : lattice_bins)
            if (b < 1) throw std::invalid_argument("sampler: bins must be >= 1");
    }
}

int SamplerConfig::starts_per_wave(int dim) const {
    (void)dim;
    if (!lattice_bins.empty()) {
        int n = 1;
        for (int b : lattice_bins) n *= b;
        return n;
    }
    return ensemble_size;
}

std::vector<std::vector<double>> random_batch(const Bounds& bounds, int n, std::mt19937_64& rng) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(bounds.dim());
        for (std::size_t k = 0; k < bounds.dim(); ++k)
            x[k] = bounds.lo[k] + bounds.span(k) * unit(rng);
        out.push_back(std::move(x));
    }
    return out;
}

namespace {

std::vector<double> point_in_cell(const Bounds& bounds, const std::vector<int>& bins,
                                  const std::vector<int>& cell, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(bounds.dim());
    for (std::size_t k = 0; k < bounds.dim(); ++k) {
        const double w = bounds.span(k) / bins[k];
        x[k] = bounds.lo[k] + (cell[k] + unit(rng)) * w;
    }
    return x;
}

}  // namespace

std::vector<std::vector<double>> lattice_starts(const Bounds& bounds, const std::vector<int>& bins,
                                                std::mt19937_64& rng) {
    if (bins.size() != bounds.dim())
        throw std::invalid_argument("lattice: bins tuple length must equal dim");
    std::vector<std::vector<double>> out;
    std::vector<int> cell(bins.size(), 0);
    for (;;) {
        out.push_back(point_in_cell(bounds, bins, cell, rng));
        std::size_t k = 0;
        while (k < cell.size()) {
            if (++cell[k] < bins[k]) break;
            cell[k] = 0;
            ++k;
        }
        if (k == cell.size()) break;
    }
    return out;
}

std::vector<std::vector<double>> lattice_starts(const Bounds& bounds, int n_s,
                                                std::mt19937_64& rng) {
    if (n_s < 1) throw std::invalid_argument("lattice: n_s must be >= 1");
    const std::size_t dim = bounds.dim();
    // smallest uniform grid holding at least n_s cells
    int per_dim = 1;
    auto cells_of = [&](int b) {
        long long c = 1;
        for (std::size_t k = 0; k < dim; ++k) c *= b;
        return c;
    };
    while (cells_of(per_dim) < n_s) ++per_dim;
    const long long total = cells_of(per_dim);

    // partial Fisher-Yates for n_s distinct cells
    std::vector<long long> ids(static_cast<std::size_t>(total));
    for (long long i = 0; i < total; ++i) ids[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n_s; ++i) {
        std::uniform_int_distribution<long long> pick(i, total - 1);
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(pick(rng))]);
    }

    const std::vector<int> bins(dim, per_dim);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n_s));
    for (int i = 0; i < n_s; ++i) {
        long long id = ids[static_cast<std::size_t>(i)];
        std::vector<int> cell(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            cell[k] = static_cast<int>(id % per_dim);
            id /= per_dim;
        }
        out.push_back(point_in_cell(bounds, bins, cell, rng));
    }
    return out;
}

std::vector<std::vector<double>> sparsity_starts(const Bounds& bounds,
                                                 const std::vector<std::vector<double>>& existing,
                                                 int k, int pool_size, std::mt19937_64& rng) {
    if (k < 1) throw std::invalid_argument("sparsity: k must be >= 1");
    if (pool_size <= 0) pool_size = 10 * k * static_cast<int>(bounds.dim());
    if (pool_size < k) throw std::invalid_argument("sparsity: pool_size must be >= k");
    const auto pool = random_batch(bounds, pool_size, rng);

    std::vector<double> nearest(pool.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (const auto& e : existing)
            nearest[i] = std::min(nearest[i], squared_distance(pool[i], e));

    std::vector<char> taken(pool.size(), 0);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int pick = 0; pick < k; ++pick) {
        std::size_t best = pool.size();
        double best_d = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            if (nearest[i] > best_d) {  // strict: ties keep the lowest index
                best_d = nearest[i];
                best = i;
            }
        }
        taken[best] = 1;
        out.push_back(pool[best]);
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!taken[i]) nearest[i] = std::min(nearest[i], squared_distance(pool[i], pool[best]));
    }
    return out;
}

namespace {

std::vector<std::vector<double>> draw_starts(const SamplerConfig& cfg, const Bounds& bounds,
                                             const EvalStore& store, std::mt19937_64& rng) {
    switch (cfg.strategy) {
        case SamplingStrategy::random:
            return random_batch(bounds, cfg.ensemble_size, rng);
        case SamplingStrategy::lattice:
            if (!cfg.lattice_bins.empty()) return lattice_starts(bounds, cfg.lattice_bins, rng);
            return lattice_starts(bounds, cfg.ensemble_size, rng);
        case SamplingStrategy::sparsity: {
            std::vector<std::vector<double>> existing;
            for (auto& p : store.query_all()) existing.push_back(std::move(p.x));
            return sparsity_starts(bounds, existing, cfg.ensemble_size, cfg.pool_size, rng);
        }
    }
    throw std::logic_error("unreachable strategy");
}

}  // namespace

SampleResult sample_iteration(const Model& model, EvalStore& store, const SamplerConfig& cfg,
                              const SolverConfig& solver, const Bounds& bounds, int iteration) {
    cfg.validate(model.spec.dim);
    if (store.dim() != model.spec.dim)
        throw std::invalid_argument("sample_iteration: store/model dimension mismatch");
    auto rng = make_rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(iteration) + 1));
    const std::size_t before = store.size();
    SampleResult result;

    auto fresh = [&] { return static_cast<int>(store.size() - before); };

    if (!cfg.directed) {
        while (fresh() < cfg.warm) {
            for (const auto& x : random_batch(bounds, cfg.batch_size, rng))
                store.cached_evaluate(model, x, iteration, EvalSource::sampler_start);
        }
        result.new_evals = fresh();
        return result;
    }

    const int per_wave = cfg.starts_per_wave(model.spec.dim);
    const int max_waves = (cfg.warm + per_wave - 1) / per_wave;
    const Objective objective = [&](std::span<const double> x) {
        return store.cached_evaluate(model, x, iteration, EvalSource::solver_step);
    };
    for (int wave = 0; wave < max_waves && fresh() < cfg.warm; ++wave) {
        const auto starts = draw_starts(cfg, bounds, store, rng);
        for (const auto& x : starts)
            store.cached_evaluate(model, x, iteration, EvalSource::sampler_start);
        for (const auto& x : starts)
            result.traces.push_back(nelder_mead(objective, x, bounds, solver));
    }
    result.new_evals = fresh();
    return result;
}

}  // namespace surval
