#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "surval/bounds.hpp"

namespace surval {

struct SolverConfig {
    double xtol = 1e-4;
    double ftol = 1e-4;
    int max_iterations = 0;  // 0 means 200 * dim
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;

    void validate() const;
    int resolved_max_iterations(int dim) const {
        return max_iterations > 0 ? max_iterations : 200 * dim;
    }
};

enum class Termination { tolerance, max_iterations };

struct SolverTrace {
    std::vector<std::pair<std::vector<double>, double>> evaluations;
    std::vector<int> iteration_marks;  // evaluation count at the end of each iteration
    std::vector<double> x_best;
    double f_best = 0;
    int iterations_used = 0;
    Termination terminated_by = Termination::max_iterations;
};

using Objective = std::function<double(std::span<const double>)>;

/// Simplex of dim+1 vertices around x0: coordinate i stepped by 5% of its
/// value (0.00025 when zero), flipped inward when clipping would collapse a
/// vertex onto x0.
std::vector<std::vector<double>> initial_simplex(const std::vector<double>& x0,
                                                 const Bounds& bounds);

/// Bounded Nelder-Mead descent. Candidates are clipped to the bounds before
/// every evaluation, and every evaluation appears in the trace. Terminates
/// when both the per-coordinate simplex spread and the value spread fall
/// below xtol/ftol within one iteration, or at the iteration cap.
SolverTrace nelder_mead(const Objective& objective, const std::vector<double>& x0,
                        const Bounds& bounds, const SolverConfig& config = {},
                        const std::optional<std::vector<std::vector<double>>>& simplex_override =
                            std::nullopt);

/// Independent solver per start, run in start order.
std::vector<SolverTrace> run_ensemble(const Objective& objective,
                                      const std::vector<std::vector<double>>& starts,
                                      const Bounds& bounds, const SolverConfig& config = {});

}  // namespace surval
