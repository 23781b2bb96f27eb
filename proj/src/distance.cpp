#include "surval/distance.hpp"

#include <cmath>
#include <stdexcept>

#include "surval/parallel.hpp"

namespace surval {

namespace {

// inner search settings: a short local descent from x', restarted with a
// fresh simplex to undo valley collapse, within one shared iteration budget
constexpr double kInnerTol = 1e-6;
constexpr int kInnerMaxIterations = 200;
constexpr double kInnerScales[] = {0.1, 1e-3, 1e-5};  // of the per-dimension span

}  // namespace

std::string to_string(DistanceMode m) {
    return m == DistanceMode::vertical ? "vertical" : "graphical";
}

DistanceMode distance_mode_from_string(const std::string& s) {
    if (s == "vertical") return DistanceMode::vertical;
    if (s == "graphical") return DistanceMode::graphical;
    throw std::invalid_argument("unknown distance mode: " + s);
}

DistanceReport DistanceReport::from_values(std::vector<double> values) {
    DistanceReport r;
    r.per_point = std::move(values);
    double sum = 0, carry = 0;
    double max = 0;
    for (double v : r.per_point) {
        const double t = v - carry;
        const double next = sum + t;
        carry = (next - sum) - t;
        sum = next;
        if (v > max) max = v;
    }
    r.sum = sum;
    r.max = max;
    r.ave = r.per_point.empty() ? 0 : sum / static_cast<double>(r.per_point.size());
    return r;
}

double vertical_distance(const Surrogate& s, std::span<const double> x, double y) {
    return std::abs(s.predict(x) - y);
}

double graphical_distance(const Surrogate& s, std::span<const double> x, double y,
                          const Bounds& bounds) {
    const double vertical = vertical_distance(s, x, y);
    if (vertical == 0.0) return 0.0;

    const std::size_t dim = x.size();
    const Objective g = [&](std::span<const double> z) {
        return std::abs(s.predict(z) - y) + euclidean_distance(z, x);
    };

    auto simplex_at = [&](const std::vector<double>& seed, double scale) {
        std::vector<std::vector<double>> simplex;
        simplex.push_back(seed);
        for (std::size_t k = 0; k < dim; ++k) {
            std::vector<double> v = seed;
            const double step = scale * bounds.span(k);
            v[k] = seed[k] + step;
            bounds.clip(v);
            if (v[k] == seed[k]) v[k] = seed[k] - step;
            bounds.clip(v);
            simplex.push_back(std::move(v));
        }
        return simplex;
    };

    std::vector<double> best_x(x.begin(), x.end());
    bounds.clip(best_x);
    double best = vertical;

    // Gauss-Newton projection onto the level set y(z) = y; where the
    // expansion is steep this lands on the closest graph point, which the
    // simplex search cannot reach inside its canyon
    {
        std::vector<double> z = best_x;
        for (int step = 0; step < 20; ++step) {
            const double residual = s.predict(z) - y;
            if (residual == 0.0) break;
            const std::vector<double> grad = s.gradient(z);
            double norm2 = 0;
            for (double v : grad) norm2 += v * v;
            if (!(norm2 > 1e-30)) break;
            const double scale = -residual / norm2;
            for (std::size_t k = 0; k < dim; ++k) z[k] += scale * grad[k];
            bounds.clip(z);
            const double candidate = g(z);
            if (candidate < best) {
                best = candidate;
                best_x = z;
            }
            if (std::abs(residual) < 1e-15) break;
        }
    }

    int budget = kInnerMaxIterations;
    const int passes = static_cast<int>(std::size(kInnerScales));
    for (int p = 0; p < passes && budget > 0; ++p) {
        SolverConfig cfg;
        cfg.xtol = kInnerTol;
        cfg.ftol = kInnerTol;
        cfg.max_iterations = std::max(1, budget / (passes - p));
        const SolverTrace trace =
            nelder_mead(g, best_x, bounds, cfg, simplex_at(best_x, kInnerScales[p]));
        budget -= trace.iterations_used;
        if (trace.f_best < best) {
            best = trace.f_best;
            best_x = trace.x_best;
        }
    }
    return std::min(best, vertical);
}

DistanceReport report(const Surrogate& s, const std::vector<DataPoint>& data, DistanceMode mode,
                      const Bounds& bounds, int threads) {
    if (data.empty()) throw std::invalid_argument("distance report: empty data");
    std::vector<double> values(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) {
        values[i] = mode == DistanceMode::vertical
                        ? vertical_distance(s, data[i].x, data[i].y)
                        : graphical_distance(s, data[i].x, data[i].y, bounds);
    });
    return DistanceReport::from_values(std::move(values));
}

}  // namespace surval
