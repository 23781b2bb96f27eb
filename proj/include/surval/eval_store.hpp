#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "surval/models.hpp"

namespace surval {

enum class EvalSource { sampler_start, solver_step, probe };

std::string to_string(EvalSource s);
EvalSource eval_source_from_string(const std::string& s);

struct EvalRecord {
    std::vector<double> x;
    double y = 0;
    int iteration = 0;
    EvalSource source = EvalSource::probe;
    std::uint64_t seq = 0;
};

struct DataPoint {
    std::vector<double> x;
    double y = 0;
};

struct StoreFingerprint {
    std::uint64_t count = 0;
    std::uint64_t hash = 0;
    bool operator==(const StoreFingerprint&) const = default;
};

/// Append-only log of model evaluations plus an exact-match cache so a model
/// is never re-evaluated at an input it has already seen. Writes serialize
/// through one mutex; reads copy under the same lock.
class EvalStore {
public:
    explicit EvalStore(int dim);

    EvalStore(EvalStore&& other) noexcept;
    EvalStore& operator=(EvalStore&& other) noexcept;
    EvalStore(const EvalStore&) = delete;
    EvalStore& operator=(const EvalStore&) = delete;

    int dim() const { return dim_; }

    /// Append one record. Returns the assigned seq.
    std::uint64_t record(std::span<const double> x, double y, int iteration, EvalSource source);

    /// Return the cached y for a previously seen x (bitwise match), or evaluate
    /// the model, record the result, and return it.
    double cached_evaluate(const Model& model, std::span<const double> x, int iteration,
                           EvalSource source);

    std::vector<DataPoint> query_all() const;
    std::vector<DataPoint> query_iteration(int iteration) const;
    /// Per-iteration partitions for the last n iterations (oldest first),
    /// truncated at the start of history.
    std::vector<std::vector<DataPoint>> query_last_iterations(int n) const;

    std::vector<EvalRecord> snapshot() const;

    std::size_t size() const;
    int max_iteration() const;  // -1 when empty
    std::uint64_t model_calls() const;
    std::uint64_t cache_hits() const;

    StoreFingerprint fingerprint() const;

    /// Persist every future record to the file as well. Existing records are
    /// flushed to it first (the file is truncated).
    void attach_file(const std::string& path);

    void save(const std::string& path) const;

    /// Load a line-delimited eval DB. A truncated final line is dropped with a
    /// warning on stderr; malformed content elsewhere is an error.
    static EvalStore load(const std::string& path);

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint64_t>& k) const;
    };

    std::uint64_t record_locked(std::span<const double> x, double y, int iteration,
                                EvalSource source);
    static std::vector<std::uint64_t> cache_key(std::span<const double> x);
    void write_line(const EvalRecord& r);

    int dim_;
    std::vector<EvalRecord> records_;
    std::unordered_map<std::vector<std::uint64_t>, std::size_t, KeyHash> cache_;
    std::uint64_t model_calls_ = 0;
    std::uint64_t cache_hits_ = 0;
    mutable std::mutex mutex_;
    std::ofstream sink_;
};

}  // namespace surval
