#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "surval/eval_store.hpp"

namespace surval {

/// Fit-time knobs: diagonal relaxation of the interpolation system and the
/// scale of the seeded Gaussian jitter applied to the centers.
struct Hyperparams {
    double smooth = 0.0;
    double noise_sigma = 1e-8;  // relative to the per-dimension data range
    std::uint64_t noise_seed = 0;
};

class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, std::size_t n, double rcond)
        : std::runtime_error(what), n_(n), rcond_(rcond) {}
    std::size_t size() const { return n_; }
    double rcond() const { return rcond_; }

private:
    std::size_t n_;
    double rcond_;
};

/// Thin-plate kernel r^2 ln r, with the analytic limit 0 at r = 0.
double thin_plate(double r);

/// Interpolant y(x) = sum_j beta_j * phi(|x - c_j|) over jittered centers c_j.
/// Immutable after construction; predict is safe to call concurrently.
class Surrogate {
public:
    Surrogate() = default;

    double predict(std::span<const double> x) const;

    /// Analytic gradient of the expansion at x.
    std::vector<double> gradient(std::span<const double> x) const;

    int dim() const { return static_cast<int>(centers_.cols()); }
    std::size_t center_count() const { return static_cast<std::size_t>(centers_.rows()); }
    const Eigen::MatrixXd& centers() const { return centers_; }
    const Eigen::VectorXd& coefficients() const { return coefficients_; }
    const Hyperparams& hyper() const { return hyper_; }
    const StoreFingerprint& training_fingerprint() const { return fingerprint_; }

    bool stale_for(const StoreFingerprint& current) const { return !(fingerprint_ == current); }

    std::string serialize() const;
    static Surrogate deserialize(const std::string& doc);

    friend Surrogate fit(const std::vector<DataPoint>& data, const Hyperparams& hyper,
                         std::optional<StoreFingerprint> fingerprint);

private:
    Eigen::MatrixXd centers_;       // N x dim
    Eigen::VectorXd coefficients_;  // N
    Hyperparams hyper_;
    StoreFingerprint fingerprint_;
};

/// Solve (M - smooth*I) beta = Y for the thin-plate coefficients, M_ij =
/// phi(|c_i - c_j|). Centers are the data inputs plus seeded Gaussian jitter
/// of scale noise_sigma * (per-dimension data range). Throws FitError when
/// the system's estimated reciprocal condition number falls below 1e-14.
Surrogate fit(const std::vector<DataPoint>& data, const Hyperparams& hyper = {},
              std::optional<StoreFingerprint> fingerprint = std::nullopt);

/// Indices of at most cap points: all bitwise matches of keep_x first, then
/// greedy farthest-point selection over the rest. Identity when the data
/// already fits. Returned indices are sorted (original data order).
std::vector<std::size_t> select_fit_subset(const std::vector<DataPoint>& data, std::size_t cap,
                                           const std::vector<std::vector<double>>& keep_x = {});

namespace rbf_detail {
/// Dense kernel matrix for the given centers (tests verify its symmetry).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& centers);
}  // namespace rbf_detail

}  // namespace surval
