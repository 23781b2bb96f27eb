#include "surval/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surval {

void SolverConfig::validate() const {
    if (xtol <= 0 || ftol <= 0) throw std::invalid_argument("solver: tolerances must be > 0");
    if (max_iterations < 0) throw std::invalid_argument("solver: max_iterations must be >= 0");
    if (reflection <= 0) throw std::invalid_argument("solver: reflection must be > 0");
    if (expansion <= 1) throw std::invalid_argument("solver: expansion must be > 1");
    if (contraction <= 0 || contraction >= 1)
        throw std::invalid_argument("solver: contraction must be in (0, 1)");
    if (shrink <= 0 || shrink >= 1) throw std::invalid_argument("solver: shrink must be in (0, 1)");
}

std::vector<std::vector<double>> initial_simplex(const std::vector<double>& x0,
                                                 const Bounds& bounds) {
    if (!bounds.contains(x0)) throw std::invalid_argument("initial_simplex: x0 out of bounds");
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> vertices;
    vertices.push_back(x0);
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> v = x0;
        const double step = x0[i] != 0.0 ? 0.05 * x0[i] : 0.00025;
        v[i] = x0[i] + step;
        bounds.clip(v);
        if (v[i] == x0[i]) {
            // perturbation clipped away; flip toward the interior
            v[i] = x0[i] - step;
            bounds.clip(v);
        }
        if (v[i] == x0[i])
            throw std::invalid_argument("initial_simplex: bounds too tight in dimension " +
                                        std::to_string(i));
        vertices.push_back(std::move(v));
    }
    return vertices;
}

SolverTrace nelder_mead(const Objective& objective, const std::vector<double>& x0,
                        const Bounds& bounds, const SolverConfig& config,
                        const std::optional<std::vector<std::vector<double>>>& simplex_override) {
    config.validate();
    if (!bounds.contains(x0)) throw std::invalid_argument("nelder_mead: x0 out of bounds");
    const std::size_t dim = x0.size();
    const int max_iter = config.resolved_max_iterations(static_cast<int>(dim));

    SolverTrace trace;
    auto eval = [&](std::vector<double> x) {
        bounds.clip(x);
        const double f = objective(x);
        trace.evaluations.emplace_back(x, f);
        return std::make_pair(std::move(x), f);
    };

    std::vector<std::vector<double>> simplex =
        simplex_override ? *simplex_override : initial_simplex(x0, bounds);
    if (simplex.size() != dim + 1)
        throw std::invalid_argument("nelder_mead: simplex must have dim+1 vertices");
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) {
        auto [x, f] = eval(simplex[i]);
        simplex[i] = std::move(x);
        values[i] = f;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2(simplex.size());
        std::vector<double> v2(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            s2[i] = std::move(simplex[idx[i]]);
            v2[i] = values[idx[i]];
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    auto spreads_below_tol = [&] {
        for (std::size_t k = 0; k < dim; ++k) {
            double lo = simplex[0][k], hi = simplex[0][k];
            for (const auto& v : simplex) {
                lo = std::min(lo, v[k]);
                hi = std::max(hi, v[k]);
            }
            if (hi - lo >= config.xtol) return false;
        }
        const auto [fmin, fmax] = std::minmax_element(values.begin(), values.end());
        return *fmax - *fmin < config.ftol;
    };

    order();
    trace.terminated_by = Termination::max_iterations;
    int iter = 0;
    while (iter < max_iter) {
        ++iter;
        if (spreads_below_tol()) {
            trace.terminated_by = Termination::tolerance;
            break;
        }
        const std::size_t worst = simplex.size() - 1;
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < worst; ++i)
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
        for (std::size_t k = 0; k < dim; ++k) centroid[k] /= static_cast<double>(worst);

        auto along = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k)
                x[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
            return x;
        };

        auto [xr, fr] = eval(along(-config.reflection));
        if (fr < values[0]) {
            auto [xe, fe] = eval(along(-config.reflection * config.expansion));
            if (fe < fr) {
                simplex[worst] = std::move(xe);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(xr);
                values[worst] = fr;
            }
        } else if (fr < values[worst - 1]) {
            simplex[worst] = std::move(xr);
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            auto [xc, fc] = eval(along(outside ? -config.reflection * config.contraction
                                               : config.contraction));
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(xc);
                values[worst] = fc;
            } else {
                for (std::size_t i = 1; i < simplex.size(); ++i) {
                    std::vector<double> x(dim);
                    for (std::size_t k = 0; k < dim; ++k)
                        x[k] = simplex[0][k] + config.shrink * (simplex[i][k] - simplex[0][k]);
                    auto [xs, fs] = eval(std::move(x));
                    simplex[i] = std::move(xs);
                    values[i] = fs;
                }
            }
        }
        order();
        trace.iteration_marks.push_back(static_cast<int>(trace.evaluations.size()));
    }
    trace.iterations_used = iter;

    // terminal = best evaluation seen, which the simplex always retains
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.evaluations.size(); ++i)
        if (trace.evaluations[i].second < trace.evaluations[best].second) best = i;
    trace.x_best = trace.evaluations[best].first;
    trace.f_best = trace.evaluations[best].second;
    return trace;
}

std::vector<SolverTrace> run_ensemble(const Objective& objective,
                                      const std::vector<std::vector<double>>& starts,
                                      const Bounds& bounds, const SolverConfig& config) {
    std::vector<SolverTrace> traces;
    traces.reserve(starts.size());
    for (const auto& s : starts) traces.push_back(nelder_mead(objective, s, bounds, config));
    return traces;
}

}  // namespace surval
