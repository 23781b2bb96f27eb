#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "surval/eval_store.hpp"
#include "surval/models.hpp"

using namespace surval;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("record appends and partitions by iteration") {
    EvalStore store(2);
    const std::vector<double> x{1.0, 2.0};
    CHECK(store.record(x, 5.0, 0, EvalSource::sampler_start) == 0);
    CHECK(store.size() == 1);

    // append-only: duplicates make two records, cache keeps the first y
    CHECK(store.record(x, 7.0, 0, EvalSource::probe) == 1);
    CHECK(store.size() == 2);
    const Model m{{"const", 2, Bounds::cube(0, 10, 2), ""},
                  [](std::span<const double>) { return -1.0; }};
    CHECK(store.cached_evaluate(m, x, 0, EvalSource::probe) == 5.0);
    CHECK(store.model_calls() == 0);

    for (int i = 0; i < 1000; ++i)
        store.record(std::vector<double>{static_cast<double>(i), 0.0}, 1.0, 1,
                     EvalSource::solver_step);
    CHECK(store.query_iteration(1).size() == 1000);
    CHECK(store.query_iteration(0).size() == 2);
    CHECK(store.query_iteration(5).empty());
    CHECK(store.query_all().size() == 1002);

    const std::vector<double> bad{1.0};
    CHECK_THROWS_AS(store.record(bad, 0.0, 0, EvalSource::probe), std::invalid_argument);
}

TEST_CASE("cached_evaluate hits on exact bits only") {
    EvalStore store(2);
    int calls = 0;
    const Model m{{"count", 2, Bounds::cube(0, 10, 2), ""},
                  [&calls](std::span<const double> x) {
                      ++calls;
                      return x[0] + x[1];
                  }};
    const std::vector<double> a{0.5, 0.25};
    CHECK(store.cached_evaluate(m, a, 0, EvalSource::sampler_start) == 0.75);
    CHECK(store.cached_evaluate(m, a, 1, EvalSource::probe) == 0.75);
    CHECK(calls == 1);
    CHECK(store.size() == 1);  // cache hit adds no record
    CHECK(store.model_calls() == 1);
    CHECK(store.cache_hits() == 1);

    // a 1-ulp difference is a different point
    std::vector<double> b = a;
    b[0] = std::nextafter(b[0], 1.0);
    store.cached_evaluate(m, b, 1, EvalSource::probe);
    CHECK(calls == 2);
    CHECK(store.model_calls() + store.cache_hits() == 3);
}

TEST_CASE("cached_evaluate composes with the model registry") {
    EvalStore store(2);
    const Model m = model_registry("rastrigin2");
    const std::vector<double> origin{0.0, 0.0};
    CHECK(store.cached_evaluate(m, origin, 0, EvalSource::sampler_start) == 0.0);
    CHECK(store.size() == 1);
}

TEST_CASE("query_last_iterations truncates at history start") {
    EvalStore store(1);
    store.record(std::vector<double>{0.1}, 1.0, 0, EvalSource::sampler_start);
    store.record(std::vector<double>{0.2}, 2.0, 1, EvalSource::sampler_start);
    auto parts = store.query_last_iterations(3);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 1);
    CHECK(parts[0][0].y == 1.0);
    CHECK(parts[1][0].y == 2.0);
}

TEST_CASE("save and load round-trip exactly") {
    const std::string path = temp_path("surval_store_roundtrip.db");
    EvalStore store(2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 17);
    for (int i = 0; i < 257; ++i)
        store.record(std::vector<double>{u(rng), u(rng)}, u(rng), i % 4,
                     i % 2 ? EvalSource::probe : EvalSource::solver_step);
    store.save(path);
    const EvalStore loaded = EvalStore::load(path);
    const auto a = store.snapshot();
    const auto b = loaded.snapshot();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);  // bitwise
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].iteration == b[i].iteration);
        CHECK(a[i].source == b[i].source);
        CHECK(a[i].seq == b[i].seq);
    }
    CHECK(store.fingerprint() == loaded.fingerprint());
    std::remove(path.c_str());
}

TEST_CASE("load drops a truncated final line with a warning") {
    const std::string path = temp_path("surval_store_truncated.db");
    EvalStore store(1);
    store.record(std::vector<double>{1.0}, 2.0, 0, EvalSource::sampler_start);
    store.record(std::vector<double>{3.0}, 4.0, 0, EvalSource::sampler_start);
    store.save(path);
    {
        std::ofstream app(path, std::ios::app);
        app << "{\"x\":[5.0],\"y\":6.0,\"it";  // simulated crash mid-write
    }
    const EvalStore loaded = EvalStore::load(path);
    CHECK(loaded.size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("load rejects malformed content before the final line") {
    const std::string path = temp_path("surval_store_malformed.db");
    {
        std::ofstream out(path);
        out << "{\"x\":[1.0],\"y\":2.0,\"iter\":0,\"src\":\"probe\",\"seq\":0}\n";
        out << "not json at all\n";
        out << "{\"x\":[3.0],\"y\":4.0,\"iter\":0,\"src\":\"probe\",\"seq\":1}\n";
    }
    CHECK_THROWS_AS((void)EvalStore::load(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("attached file persists every record as it arrives") {
    const std::string path = temp_path("surval_store_attached.db");
    {
        EvalStore store(2);
        store.attach_file(path);
        store.record(std::vector<double>{1.5, 2.5}, 3.5, 0, EvalSource::sampler_start);
        store.record(std::vector<double>{4.5, 5.5}, 6.5, 1, EvalSource::solver_step);
    }
    const EvalStore loaded = EvalStore::load(path);
    CHECK(loaded.size() == 2);
    CHECK(loaded.snapshot()[1].y == 6.5);
    std::remove(path.c_str());
}

TEST_CASE("iteration records keep their relative order in query_all") {
    EvalStore store(1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 300; ++i)
        store.record(std::vector<double>{u(rng)}, u(rng), i % 3, EvalSource::probe);
    const auto all = store.query_all();
    const auto part = store.query_iteration(1);
    std::size_t cursor = 0;
    const auto records = store.snapshot();
    for (std::size_t i = 0; i < records.size() && cursor < part.size(); ++i) {
        if (records[i].iteration != 1) continue;
        CHECK(part[cursor].x == all[i].x);
        CHECK(part[cursor].y == all[i].y);
        ++cursor;
    }
    CHECK(cursor == part.size());
}

TEST_CASE("counters partition every cached_evaluate call") {
    EvalStore store(1);
    int calls = 0;
    const Model m{{"c", 1, Bounds::cube(0, 1, 1), ""}, [&calls](std::span<const double> x) {
                      ++calls;
                      return 2 * x[0];
                  }};
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> grid(0, 9);
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        const std::vector<double> x{grid(rng) / 10.0};
        store.cached_evaluate(m, x, 0, EvalSource::probe);
    }
    CHECK(store.model_calls() + store.cache_hits() == total);
    CHECK(store.model_calls() == static_cast<std::uint64_t>(calls));
    CHECK(store.size() == store.model_calls());
}
