#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "surval/bounds.hpp"

namespace surval {

struct ModelSpec {
    std::string id;
    int dim = 0;
    Bounds bounds;
    std::string description;
};

/// An expensive model under study: a deterministic scalar response over a box.
struct Model {
    ModelSpec spec;
    std::function<double(std::span<const double>)> fn;

    double evaluate(std::span<const double> x) const;
};

// Benchmark response surfaces. Each throws std::invalid_argument on a
// dimension mismatch.

double rastrigin(std::span<const double> x, int dim);
double rosenbrock(std::span<const double> x, int dim);
double hartmann6(std::span<const double> x);
double easom(std::span<const double> x);
double michalewicz(std::span<const double> x, int steepness = 10);

/// Piecewise response in (n_b, y_p) with an exactly flat shelf between the
/// onset n1(y_p) and end n2(y_p), both affine increasing in y_p.
struct PlateauParams {
    double gamma1 = 2.0;   // low-branch exponent
    double gamma2 = 3.0;   // high-branch exponent
    double amplitude = 1.0;
    double onset_base = 0.25;   // n1(y_p) = onset_base + onset_slope * y_p
    double onset_slope = 0.5;
    double width = 0.3;         // n2(y_p) = n1(y_p) + width

    double onset(double y_p) const { return onset_base + onset_slope * y_p; }
    double end(double y_p) const { return onset(y_p) + width; }
};

double plateau_pressure(double n_b, double y_p, const PlateauParams& params = {});

Bounds plateau_bounds();

/// Lookup by string id: rastrigin2, rosenbrock2, rosenbrock8, easom,
/// michalewicz2, hartmann6, plateau. Throws std::invalid_argument for
/// unknown ids.
Model model_registry(const std::string& id);

std::vector<std::string> model_registry_ids();

}  // namespace surval
