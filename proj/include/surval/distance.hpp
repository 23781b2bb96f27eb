#pragma once

#include <span>
#include <vector>

#include "surval/bounds.hpp"
#include "surval/eval_store.hpp"
#include "surval/nelder_mead.hpp"
#include "surval/rbf.hpp"

namespace surval {

enum class DistanceMode { vertical, graphical };

std::string to_string(DistanceMode m);
DistanceMode distance_mode_from_string(const std::string& s);

struct DistanceReport {
    std::vector<double> per_point;
    double ave = 0;
    double max = 0;
    double sum = 0;

    /// Aggregate a per-point distance list (compensated summation).
    static DistanceReport from_values(std::vector<double> values);
};

/// |y(x') - y|: the misfit at the point's own input.
double vertical_distance(const Surrogate& s, std::span<const double> x, double y);

/// Approximate inf over the box of |y(x) - y| + |x - x'|, found by a simplex
/// search seeded at x'. Never exceeds the vertical distance.
double graphical_distance(const Surrogate& s, std::span<const double> x, double y,
                          const Bounds& bounds);

/// Per-point distances for the whole data set under the given mode.
/// Points are independent; the computation fans out over threads and returns
/// results identical to a sequential pass.
DistanceReport report(const Surrogate& s, const std::vector<DataPoint>& data, DistanceMode mode,
                      const Bounds& bounds, int threads = 0);

}  // namespace surval
