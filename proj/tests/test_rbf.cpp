#include <doctest.h>

#include <cmath>
#include <random>

#include "surval/models.hpp"
#include "surval/rbf.hpp"

using namespace surval;

namespace {

std::vector<DataPoint> sample_model(const Model& m, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<DataPoint> data;
    data.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(m.spec.bounds.dim());
        for (std::size_t k = 0; k < x.size(); ++k) {
            std::uniform_real_distribution<double> u(m.spec.bounds.lo[k], m.spec.bounds.hi[k]);
            x[k] = u(rng);
        }
        const double y = m.evaluate(x);
        data.push_back({std::move(x), y});
    }
    return data;
}

double output_range(const std::vector<DataPoint>& data) {
    double lo = data.front().y, hi = data.front().y;
    for (const auto& p : data) {
        lo = std::min(lo, p.y);
        hi = std::max(hi, p.y);
    }
    return hi - lo;
}

}  // namespace

TEST_CASE("thin plate kernel values") {
    CHECK(thin_plate(0.0) == 0.0);
    CHECK(thin_plate(1.0) == 0.0);
    const double e = std::exp(1.0);
    CHECK(thin_plate(e) == doctest::Approx(e * e).epsilon(1e-12));
    CHECK_THROWS_AS((void)thin_plate(-1e-9), std::domain_error);
}

TEST_CASE("fit rejects duplicate centers at zero jitter") {
    Hyperparams h;
    h.noise_sigma = 0;
    const std::vector<DataPoint> dup{{{1.0}, 2.0}, {{1.0}, 2.0}};
    CHECK_THROWS_AS((void)fit(dup, h), FitError);
}

TEST_CASE("fit rejects undersized or inconsistent data") {
    Hyperparams h;
    CHECK_THROWS_AS((void)fit({}, h), std::invalid_argument);
    const std::vector<DataPoint> two{{{1.0, 2.0}, 0.0}, {{2.0, 1.0}, 1.0}};
    CHECK_THROWS_AS((void)fit(two, h), std::invalid_argument);  // need dim+1 = 3
    const std::vector<DataPoint> ragged{{{1.0, 2.0}, 0.0}, {{2.0}, 1.0}, {{0.0, 0.0}, 1.0}};
    CHECK_THROWS_AS((void)fit(ragged, h), std::invalid_argument);
}

TEST_CASE("exact interpolation of rastrigin2 samples") {
    const Model m = model_registry("rastrigin2");
    const auto data = sample_model(m, 50, 42);
    Hyperparams h;
    h.smooth = 0;
    h.noise_sigma = 0;
    const Surrogate s = fit(data, h);
    const double tol = 1e-6 * (output_range(data) + 1.0);
    for (const auto& p : data) CHECK(std::abs(s.predict(p.x) - p.y) <= tol);
}

TEST_CASE("same data and seed give bit-identical fits") {
    const Model m = model_registry("rastrigin2");
    const auto data = sample_model(m, 60, 1);
    Hyperparams h;
    h.noise_sigma = 1e-8;
    h.noise_seed = 1234;
    const Surrogate a = fit(data, h);
    const Surrogate b = fit(data, h);
    REQUIRE(a.center_count() == b.center_count());
    for (Eigen::Index i = 0; i < a.coefficients().size(); ++i)
        CHECK(a.coefficients()[i] == b.coefficients()[i]);
    CHECK(a.centers() == b.centers());
}

TEST_CASE("constant data is reproduced at the centers") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<DataPoint> data;
    for (int i = 0; i < 25; ++i) data.push_back({{u(rng), u(rng)}, 4.25});
    Hyperparams h;
    h.smooth = 0;
    h.noise_sigma = 0;
    const Surrogate s = fit(data, h);
    for (const auto& p : data) CHECK(std::abs(s.predict(p.x) - 4.25) <= 1e-8);
}

TEST_CASE("center prediction matches stored output to 1e-8 relative") {
    const Model m = model_registry("rosenbrock2");
    const auto data = sample_model(m, 40, 17);
    Hyperparams h;
    h.smooth = 0;
    h.noise_sigma = 0;
    const Surrogate s = fit(data, h);
    for (const auto& p : data) {
        const double denom = std::max(1.0, std::abs(p.y));
        CHECK(std::abs(s.predict(p.x) - p.y) / denom <= 1e-8);
    }
}

TEST_CASE("rosenbrock2 grid surrogate is accurate at the minimum") {
    std::vector<DataPoint> data;
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 30; ++j) {
            const double x0 = -2.0 + 4.0 * i / 29.0;
            const double x1 = -2.0 + 4.0 * j / 29.0;
            const std::vector<double> x{x0, x1};
            data.push_back({x, rosenbrock(x, 2)});
        }
    }
    Hyperparams h;
    h.smooth = 0;
    h.noise_sigma = 0;
    const Surrogate s = fit(data, h);
    const std::vector<double> minimum{1.0, 1.0};
    CHECK(std::abs(s.predict(minimum)) <= 0.5);
}

TEST_CASE("serialize round-trips bit-identically") {
    const Model m = model_registry("rastrigin2");
    const auto data = sample_model(m, 35, 5);
    Hyperparams h;
    h.noise_sigma = 1e-8;
    h.noise_seed = 77;
    const Surrogate s = fit(data, h);
    const Surrogate r = Surrogate::deserialize(s.serialize());
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0, 10);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        CHECK(s.predict(x) == r.predict(x));  // bitwise
    }
    CHECK(r.hyper().noise_seed == 77);
    CHECK(r.training_fingerprint() == s.training_fingerprint());
}

TEST_CASE("deserialize rejects damaged documents") {
    const Model m = model_registry("rastrigin2");
    const auto data = sample_model(m, 10, 2);
    const Surrogate s = fit(data);
    const std::string doc = s.serialize();
    CHECK_THROWS_AS((void)Surrogate::deserialize(doc.substr(0, doc.size() / 2)),
                    std::runtime_error);
    CHECK_THROWS_AS((void)Surrogate::deserialize("{}"), std::runtime_error);
    std::string wrong_version = doc;
    const auto pos = wrong_version.find("surval.surrogate/1");
    wrong_version.replace(pos, 18, "surval.surrogate/9");
    CHECK_THROWS_AS((void)Surrogate::deserialize(wrong_version), std::runtime_error);
}

TEST_CASE("fingerprint flags a stale surrogate") {
    EvalStore store(1);
    const Model m{{"lin", 1, Bounds::cube(0, 1, 1), ""},
                  [](std::span<const double> x) { return 3 * x[0]; }};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 8; ++i) {
        const std::vector<double> x{u(rng)};
        store.cached_evaluate(m, x, 0, EvalSource::probe);
    }
    const Surrogate s = fit(store.query_all(), {}, store.fingerprint());
    CHECK_FALSE(s.stale_for(store.fingerprint()));
    const std::vector<double> extra{0.123456};
    store.cached_evaluate(m, extra, 1, EvalSource::probe);
    CHECK(s.stale_for(store.fingerprint()));
}

TEST_CASE("kernel system matrix is symmetric") {
    const Model m = model_registry("rastrigin2");
    for (std::uint64_t seed : {10ULL, 20ULL}) {
        const auto data = sample_model(m, 30, seed);
        Eigen::MatrixXd centers(data.size(), 2);
        for (std::size_t i = 0; i < data.size(); ++i) {
            centers(static_cast<Eigen::Index>(i), 0) = data[i].x[0];
            centers(static_cast<Eigen::Index>(i), 1) = data[i].x[1];
        }
        const Eigen::MatrixXd g = rbf_detail::gram_matrix(centers);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            CHECK(g(i, i) == 0.0);
            for (Eigen::Index j = 0; j < i; ++j) CHECK(g(i, j) == g(j, i));  // bitwise
        }
    }
}

TEST_CASE("training residual grows with the smoothing level") {
    const Model m = model_registry("rastrigin2");
    const auto data = sample_model(m, 80, 33);
    double prev = -1.0;
    for (double smooth : {0.0, 1e-8, 1e-4, 1e-2}) {
        Hyperparams h;
        h.smooth = smooth;
        h.noise_sigma = 0;
        const Surrogate s = fit(data, h);
        double residual = 0;
        for (const auto& p : data) {
            const double d = s.predict(p.x) - p.y;
            residual += d * d;
        }
        CHECK(residual >= prev);
        prev = residual;
    }
}

TEST_CASE("prediction is invariant under training data permutation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<DataPoint> data;
    for (int i = 0; i < 12; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        data.push_back({x, std::sin(3 * x[0]) + x[1]});
    }
    Hyperparams h;
    h.smooth = 0;
    h.noise_sigma = 0;
    const Surrogate a = fit(data, h);
    std::vector<DataPoint> shuffled = data;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Surrogate b = fit(shuffled, h);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        const double va = a.predict(x);
        const double vb = b.predict(x);
        CHECK(std::abs(va - vb) <= 1e-12 * std::max(1.0, std::abs(va)));
    }
}

TEST_CASE("select_fit_subset keeps requested points and spreads the rest") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<DataPoint> data;
    for (int i = 0; i < 400; ++i) data.push_back({{u(rng), u(rng)}, 0.0});
    const std::vector<std::vector<double>> keep{data[399].x, data[123].x};
    const auto idx = select_fit_subset(data, 50, keep);
    CHECK(idx.size() == 50);
    CHECK(std::find(idx.begin(), idx.end(), 399u) != idx.end());
    CHECK(std::find(idx.begin(), idx.end(), 123u) != idx.end());
    CHECK(std::is_sorted(idx.begin(), idx.end()));

    // farthest-point picks should be better spread than the data prefix
    auto min_pairwise = [&](const std::vector<std::size_t>& ids) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                best = std::min(best, squared_distance(data[ids[i]].x, data[ids[j]].x));
        return best;
    };
    std::vector<std::size_t> prefix(50);
    for (std::size_t i = 0; i < 50; ++i) prefix[i] = i;
    CHECK(min_pairwise(idx) > min_pairwise(prefix));

    // identity when the cap is not binding
    const auto all = select_fit_subset(data, 400);
    CHECK(all.size() == 400);
    const auto uncapped = select_fit_subset(data, 0);
    CHECK(uncapped.size() == 400);
}
