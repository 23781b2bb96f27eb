#include "surval/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace surval {

namespace {

void require_dim(std::span<const double> x, int dim, const char* name) {
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(dim) +
                                    " coordinates, got " + std::to_string(x.size()));
}

constexpr double kPi = std::numbers::pi;

}  // namespace

double Model::evaluate(std::span<const double> x) const {
    require_dim(x, spec.dim, spec.id.c_str());
    return fn(x);
}

double rastrigin(std::span<const double> x, int dim) {
    require_dim(x, dim, "rastrigin");
    double s = 10.0 * dim;
    for (double xi : x) s += xi * xi - 10.0 * std::cos(2.0 * kPi * xi);
    return s;
}

double rosenbrock(std::span<const double> x, int dim) {
    if (dim < 2) throw std::invalid_argument("rosenbrock: dim must be >= 2");
    require_dim(x, dim, "rosenbrock");
    double s = 0;
    for (int i = 0; i + 1 < dim; ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

double hartmann6(std::span<const double> x) {
    require_dim(x, 6, "hartmann6");
    static constexpr double A[4][6] = {
        {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
        {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
        {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
        {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
    };
    static constexpr double C[4] = {1.0, 1.2, 3.0, 3.2};
    static constexpr double P[4][6] = {
        {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
        {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
        {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
        {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
    };
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        double e = 0;
        for (int j = 0; j < 6; ++j) {
            const double d = x[j] - P[i][j];
            e += A[i][j] * d * d;
        }
        s -= C[i] * std::exp(-e);
    }
    return s;
}

double easom(std::span<const double> x) {
    require_dim(x, 2, "easom");
    const double dx = x[0] - kPi;
    const double dy = x[1] - kPi;
    return -std::cos(x[0]) * std::cos(x[1]) * std::exp(-(dx * dx + dy * dy));
}

double michalewicz(std::span<const double> x, int steepness) {
    require_dim(x, 2, "michalewicz");
    if (steepness <= 0) throw std::invalid_argument("michalewicz: steepness must be > 0");
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double inner = std::sin(static_cast<double>(i + 1) * xi * xi / kPi);
        s -= std::sin(xi) * std::pow(inner, 2 * steepness);
    }
    return s;
}

Bounds plateau_bounds() { return Bounds({0.04, 0.01}, {1.6, 0.6}); }

double plateau_pressure(double n_b, double y_p, const PlateauParams& p) {
    const Bounds b = plateau_bounds();
    const double in[2] = {n_b, y_p};
    if (!b.contains(in)) throw std::domain_error("plateau_pressure: input out of bounds");
    const double n1 = p.onset(y_p);
    const double n2 = p.end(y_p);
    const double shelf = p.amplitude * std::pow(n1, p.gamma1);
    if (n_b <= n1) return p.amplitude * std::pow(n_b, p.gamma1);
    if (n_b <= n2) return shelf;
    return shelf + p.amplitude * std::pow(n_b - n2, p.gamma2);
}

Model model_registry(const std::string& id) {
    if (id == "rastrigin2")
        return {{id, 2, Bounds::cube(0.0, 10.0, 2), "2-D Rastrigin"},
                [](std::span<const double> x) { return rastrigin(x, 2); }};
    if (id == "rosenbrock2")
        return {{id, 2, Bounds::cube(0.0, 10.0, 2), "2-D Rosenbrock"},
                [](std::span<const double> x) { return rosenbrock(x, 2); }};
    if (id == "rosenbrock8")
        return {{id, 8, Bounds::cube(0.0, 10.0, 8), "8-D Rosenbrock"},
                [](std::span<const double> x) { return rosenbrock(x, 8); }};
    if (id == "easom")
        return {{id, 2, Bounds::cube(0.0, 10.0, 2), "2-D Easom"},
                [](std::span<const double> x) { return easom(x); }};
    if (id == "michalewicz2")
        return {{id, 2, Bounds::cube(0.0, 10.0, 2), "2-D Michalewicz"},
                [](std::span<const double> x) { return michalewicz(x); }};
    if (id == "hartmann6")
        return {{id, 6, Bounds::cube(-1.0, 1.0, 6), "6-D Hartmann"},
                [](std::span<const double> x) { return hartmann6(x); }};
    if (id == "plateau")
        return {{id, 2, plateau_bounds(), "synthetic pressure plateau"},
                [](std::span<const double> x) { return plateau_pressure(x[0], x[1]); }};
    throw std::invalid_argument("unknown model id: " + id);
}

std::vector<std::string> model_registry_ids() {
    return {"rastrigin2", "rosenbrock2", "rosenbrock8", "easom",
            "michalewicz2", "hartmann6", "plateau"};
}

}  // namespace surval
