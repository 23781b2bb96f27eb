#include "surval/rbf.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <json.hpp>

namespace surval {

namespace {

constexpr double kRcondFloor = 1e-14;
constexpr const char* kFormatVersion = "surval.surrogate/1";

// phi as a function of the squared radius; 0.5*s*ln(s) == r^2 ln r.
inline double thin_plate_sq(double s) {
    if (s == 0.0) return 0.0;
    return 0.5 * s * std::log(s);
}

Eigen::ArrayXd squared_distances(const Eigen::MatrixXd& centers, std::span<const double> x) {
    Eigen::ArrayXd s = Eigen::ArrayXd::Zero(centers.rows());
    for (Eigen::Index k = 0; k < centers.cols(); ++k)
        s += (centers.col(k).array() - x[static_cast<std::size_t>(k)]).square();
    return s;
}

Eigen::ArrayXd thin_plate_sq_vec(Eigen::ArrayXd s) {
    // clamping to the smallest denormal keeps log finite; 0.5*s*log(...) is
    // then exactly 0 for s == 0
    return 0.5 * s * s.max(std::numeric_limits<double>::denorm_min()).log();
}

}  // namespace

double thin_plate(double r) {
    if (r < 0) throw std::domain_error("thin_plate: radius must be >= 0");
    return thin_plate_sq(r * r);
}

namespace rbf_detail {

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& centers) {
    const Eigen::Index n = centers.rows();
    Eigen::MatrixXd m(n, n);
    // each pair is computed once and mirrored so the matrix is symmetric to
    // the last bit (vectorized log tails would otherwise differ per lane)
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index len = n - j;
        Eigen::ArrayXd s = Eigen::ArrayXd::Zero(len);
        for (Eigen::Index k = 0; k < centers.cols(); ++k)
            s += (centers.col(k).segment(j, len).array() - centers(j, k)).square();
        const Eigen::ArrayXd phi = thin_plate_sq_vec(std::move(s));
        m.col(j).segment(j, len) = phi.matrix();
        m.row(j).segment(j, len) = phi.matrix().transpose();
    }
    return m;
}

}  // namespace rbf_detail

double Surrogate::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("surrogate: predict dimension mismatch");
    return thin_plate_sq_vec(squared_distances(centers_, x)).matrix().dot(coefficients_);
}

std::vector<double> Surrogate::gradient(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim())
        throw std::invalid_argument("surrogate: gradient dimension mismatch");
    // d/dx of sum_j beta_j phi(r_j): phi'(r)/r = 2 ln r + 1 = ln(s) + 1
    const Eigen::ArrayXd s = squared_distances(centers_, x);
    Eigen::ArrayXd w =
        coefficients_.array() * (s.max(std::numeric_limits<double>::denorm_min()).log() + 1.0);
    w = (s == 0.0).select(0.0, w);  // the r -> 0 limit of phi'(r)/r * (x - c) is 0
    std::vector<double> grad(x.size());
    for (Eigen::Index k = 0; k < centers_.cols(); ++k)
        grad[static_cast<std::size_t>(k)] =
            (w * (x[static_cast<std::size_t>(k)] - centers_.col(k).array())).sum();
    return grad;
}

Surrogate fit(const std::vector<DataPoint>& data, const Hyperparams& hyper,
              std::optional<StoreFingerprint> fingerprint) {
    if (data.empty()) throw std::invalid_argument("fit: empty data");
    const int dim = static_cast<int>(data.front().x.size());
    const std::size_t n = data.size();
    for (const auto& p : data)
        if (static_cast<int>(p.x.size()) != dim)
            throw std::invalid_argument("fit: inconsistent data dimension");
    if (n < static_cast<std::size_t>(dim) + 1)
        throw std::invalid_argument("fit: need at least dim+1 points, got " + std::to_string(n));
    if (hyper.smooth < 0 || hyper.noise_sigma < 0)
        throw std::invalid_argument("fit: smooth and noise_sigma must be >= 0");

    Eigen::MatrixXd centers(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k) centers(static_cast<Eigen::Index>(i), k) = data[i].x[k];

    if (hyper.noise_sigma > 0) {
        std::vector<double> sigma(dim);
        for (int k = 0; k < dim; ++k) {
            const double range = centers.col(k).maxCoeff() - centers.col(k).minCoeff();
            sigma[k] = hyper.noise_sigma * range;
        }
        std::mt19937_64 rng(hyper.noise_seed);
        std::normal_distribution<double> unit(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < dim; ++k)
                if (sigma[k] > 0) centers(static_cast<Eigen::Index>(i), k) += sigma[k] * unit(rng);
    }

    Eigen::MatrixXd system = rbf_detail::gram_matrix(centers);
    system.diagonal().array() -= hyper.smooth;

    const auto ln = static_cast<lapack_int>(n);
    const double anorm = LAPACKE_dlange(LAPACK_COL_MAJOR, '1', ln, ln, system.data(), ln);
    std::vector<lapack_int> ipiv(n);
    lapack_int info =
        LAPACKE_dgetrf(LAPACK_COL_MAJOR, ln, ln, system.data(), ln, ipiv.data());
    if (info != 0)
        throw FitError("fit: singular interpolation system (n=" + std::to_string(n) +
                           ", zero pivot at " + std::to_string(info) + ")",
                       n, 0.0);
    double rcond = 0.0;
    info = LAPACKE_dgecon(LAPACK_COL_MAJOR, '1', ln, system.data(), ln, anorm, &rcond);
    if (info != 0 || rcond < kRcondFloor)
        throw FitError("fit: rank-deficient interpolation system (n=" + std::to_string(n) +
                           ", rcond=" + std::to_string(rcond) + ")",
                       n, rcond);

    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[static_cast<Eigen::Index>(i)] = data[i].y;
    info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', ln, 1, system.data(), ln, ipiv.data(),
                          rhs.data(), ln);
    if (info != 0)
        throw FitError("fit: solve failed (n=" + std::to_string(n) + ")", n, rcond);

    Surrogate s;
    s.centers_ = std::move(centers);
    s.coefficients_ = std::move(rhs);
    s.hyper_ = hyper;
    if (fingerprint) {
        s.fingerprint_ = *fingerprint;
    } else {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](double v) {
            std::uint64_t b;
            std::memcpy(&b, &v, sizeof b);
            h ^= b;
            h *= 0x100000001b3ULL;
        };
        for (const auto& p : data) {
            for (double v : p.x) mix(v);
            mix(p.y);
        }
        s.fingerprint_ = {n, h};
    }
    return s;
}

std::string Surrogate::serialize() const {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["kernel"] = "thin-plate";
    j["dim"] = dim();
    j["hyper"] = {{"smooth", hyper_.smooth},
                  {"noise_sigma", hyper_.noise_sigma},
                  {"noise_seed", hyper_.noise_seed}};
    auto centers = nlohmann::json::array();
    for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < centers_.cols(); ++k) row.push_back(centers_(i, k));
        centers.push_back(std::move(row));
    }
    j["centers"] = std::move(centers);
    auto coeffs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < coefficients_.size(); ++i) coeffs.push_back(coefficients_[i]);
    j["coefficients"] = std::move(coeffs);
    j["fingerprint"] = {{"count", fingerprint_.count}, {"hash", fingerprint_.hash}};
    return j.dump();
}

Surrogate Surrogate::deserialize(const std::string& doc) {
    nlohmann::json j = nlohmann::json::parse(doc, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw std::runtime_error("surrogate: malformed document");
    if (!j.contains("format_version") || j.at("format_version") != kFormatVersion)
        throw std::runtime_error("surrogate: unsupported format version");
    if (j.at("kernel") != "thin-plate")
        throw std::runtime_error("surrogate: unsupported kernel");
    const int dim = j.at("dim").get<int>();
    const auto& centers = j.at("centers");
    const auto& coeffs = j.at("coefficients");
    if (!centers.is_array() || !coeffs.is_array() || centers.size() != coeffs.size() ||
        centers.empty())
        throw std::runtime_error("surrogate: inconsistent centers/coefficients");
    Surrogate s;
    s.centers_.resize(static_cast<Eigen::Index>(centers.size()), dim);
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& row = centers[i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw std::runtime_error("surrogate: center dimension mismatch");
        for (int k = 0; k < dim; ++k)
            s.centers_(static_cast<Eigen::Index>(i), k) = row[k].get<double>();
    }
    s.coefficients_.resize(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        s.coefficients_[static_cast<Eigen::Index>(i)] = coeffs[i].get<double>();
    const auto& h = j.at("hyper");
    s.hyper_.smooth = h.at("smooth").get<double>();
    s.hyper_.noise_sigma = h.at("noise_sigma").get<double>();
    s.hyper_.noise_seed = h.at("noise_seed").get<std::uint64_t>();
    const auto& fp = j.at("fingerprint");
    s.fingerprint_.count = fp.at("count").get<std::uint64_t>();
    s.fingerprint_.hash = fp.at("hash").get<std::uint64_t>();
    return s;
}

std::vector<std::size_t> select_fit_subset(const std::vector<DataPoint>& data, std::size_t cap,
                                           const std::vector<std::vector<double>>& keep_x) {
    const std::size_t n = data.size();
    std::vector<std::size_t> out;
    if (cap == 0 || n <= cap) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = i;
        return out;
    }

    std::vector<char> selected(n, 0);
    std::vector<std::size_t> picks;
    picks.reserve(cap);

    auto bit_equal = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) return false;
        return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    };
    for (const auto& kx : keep_x) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!selected[i] && bit_equal(data[i].x, kx)) {
                selected[i] = 1;
                picks.push_back(i);
                break;
            }
        }
        if (picks.size() >= cap) break;
    }
    if (picks.empty()) {
        selected[0] = 1;
        picks.push_back(0);
    }

    // nearest-selected distance per candidate, updated per pick
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t p : picks)
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], squared_distance(data[i].x, data[p].x));

    while (picks.size() < cap) {
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (selected[i]) continue;
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        if (best == n) break;
        selected[best] = 1;
        picks.push_back(best);
        for (std::size_t i = 0; i < n; ++i)
            if (!selected[i])
                nearest[i] = std::min(nearest[i], squared_distance(data[i].x, data[best].x));
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

}  // namespace surval
