#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace surval {

/// Axis-aligned box of valid inputs, one closed interval per dimension.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    Bounds() = default;

    Bounds(std::vector<double> lower, std::vector<double> upper)
        : lo(std::move(lower)), hi(std::move(upper)) {
        if (lo.size() != hi.size())
            throw std::invalid_argument("bounds: lo/hi size mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i]))
                throw std::invalid_argument("bounds: lo must be < hi in every dimension");
    }

    /// Same interval [lo, hi] replicated over dim dimensions.
    static Bounds cube(double lower, double upper, std::size_t dim) {
        return Bounds(std::vector<double>(dim, lower), std::vector<double>(dim, upper));
    }

    std::size_t dim() const { return lo.size(); }

    double span(std::size_t i) const { return hi[i] - lo[i]; }

    double diagonal() const {
        double s = 0;
        for (std::size_t i = 0; i < dim(); ++i) s += span(i) * span(i);
        return std::sqrt(s);
    }

    bool contains(std::span<const double> x) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    void clip(std::vector<double>& x) const {
        for (std::size_t i = 0; i < dim(); ++i) {
            if (x[i] < lo[i]) x[i] = lo[i];
            if (x[i] > hi[i]) x[i] = hi[i];
        }
    }

    std::vector<double> clipped(std::vector<double> x) const {
        clip(x);
        return x;
    }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

}  // namespace surval
