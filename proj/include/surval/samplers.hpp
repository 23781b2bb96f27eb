#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "surval/bounds.hpp"
#include "surval/eval_store.hpp"
#include "surval/nelder_mead.hpp"

namespace surval {

enum class SamplingStrategy { random, lattice, sparsity };

std::string to_string(SamplingStrategy s);
SamplingStrategy strategy_from_string(const std::string& s);

struct SamplerConfig {
    SamplingStrategy strategy = SamplingStrategy::random;
    bool directed = false;
    int ensemble_size = 16;          // n_s, scalar form
    std::vector<int> lattice_bins;   // n_s, tuple form (lattice only); empty = scalar
    int batch_size = 500;
    int warm = 1000;
    int pool_size = 0;  // 0 means 10 * k * dim
    std::uint64_t rng_seed = 0;

    void validate(int dim) const;
    int starts_per_wave(int dim) const;
};

/// n points drawn i.i.d. uniform over the box.
std::vector<std::vector<double>> random_batch(const Bounds& bounds, int n, std::mt19937_64& rng);

/// Tuple form: one start uniformly inside each cell of the bins[0] x ... grid.
/// Scalar form: the smallest uniform grid with at least n_s cells, n_s of
/// them drawn without replacement, one start per drawn cell.
std::vector<std::vector<double>> lattice_starts(const Bounds& bounds,
                                                const std::vector<int>& bins,
                                                std::mt19937_64& rng);
std::vector<std::vector<double>> lattice_starts(const Bounds& bounds, int n_s,
                                                std::mt19937_64& rng);

/// Greedy farthest-point picks from a fresh uniform candidate pool, measured
/// against existing points plus earlier picks. Ties break on the lowest
/// candidate index; an empty reference set makes every candidate tie.
std::vector<std::vector<double>> sparsity_starts(const Bounds& bounds,
                                                 const std::vector<std::vector<double>>& existing,
                                                 int k, int pool_size, std::mt19937_64& rng);

struct SampleResult {
    int new_evals = 0;
    std::vector<SolverTrace> traces;
};

/// Add at least cfg.warm fresh evaluations for this iteration. Traditional
/// mode records uniform batches; directed mode seeds an ensemble of solvers
/// per wave and records every probe, repeating with fresh starts until the
/// warm floor is met with every launched solver terminated.
SampleResult sample_iteration(const Model& model, EvalStore& store, const SamplerConfig& cfg,
                              const SolverConfig& solver, const Bounds& bounds, int iteration);

}  // namespace surval
