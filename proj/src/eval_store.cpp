#include "surval/eval_store.hpp"

#include <cstdio>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace surval {

namespace {

std::uint64_t double_bits(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

void append_number(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string to_string(EvalSource s) {
    switch (s) {
        case EvalSource::sampler_start: return "sampler-start";
        case EvalSource::solver_step: return "solver-step";
        case EvalSource::probe: return "probe";
    }
    throw std::logic_error("unreachable eval source");
}

EvalSource eval_source_from_string(const std::string& s) {
    if (s == "sampler-start") return EvalSource::sampler_start;
    if (s == "solver-step") return EvalSource::solver_step;
    if (s == "probe") return EvalSource::probe;
    throw std::invalid_argument("unknown eval source: " + s);
}

std::size_t EvalStore::KeyHash::operator()(const std::vector<std::uint64_t>& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t v : k) {
        h ^= v;
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
}

EvalStore::EvalStore(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("eval store: dim must be >= 1");
}

EvalStore::EvalStore(EvalStore&& other) noexcept {
    std::lock_guard lock(other.mutex_);
    dim_ = other.dim_;
    records_ = std::move(other.records_);
    cache_ = std::move(other.cache_);
    model_calls_ = other.model_calls_;
    cache_hits_ = other.cache_hits_;
    sink_ = std::move(other.sink_);
}

EvalStore& EvalStore::operator=(EvalStore&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    dim_ = other.dim_;
    records_ = std::move(other.records_);
    cache_ = std::move(other.cache_);
    model_calls_ = other.model_calls_;
    cache_hits_ = other.cache_hits_;
    sink_ = std::move(other.sink_);
    return *this;
}

std::vector<std::uint64_t> EvalStore::cache_key(std::span<const double> x) {
    std::vector<std::uint64_t> k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) k[i] = double_bits(x[i]);
    return k;
}

void EvalStore::write_line(const EvalRecord& r) {
    if (!sink_.is_open()) return;
    std::string line = "{\"x\":[";
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        if (i) line += ',';
        append_number(line, r.x[i]);
    }
    line += "],\"y\":";
    append_number(line, r.y);
    line += ",\"iter\":" + std::to_string(r.iteration);
    line += ",\"src\":\"" + to_string(r.source) + "\"";
    line += ",\"seq\":" + std::to_string(r.seq) + "}\n";
    sink_ << line;
    sink_.flush();
    if (!sink_) throw std::runtime_error("eval store: write failed");
}

std::uint64_t EvalStore::record_locked(std::span<const double> x, double y, int iteration,
                                       EvalSource source) {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("eval store: record dimension mismatch");
    if (iteration < 0) throw std::invalid_argument("eval store: iteration must be >= 0");
    EvalRecord r;
    r.x.assign(x.begin(), x.end());
    r.y = y;
    r.iteration = iteration;
    r.source = source;
    r.seq = records_.size();
    // first-write-wins: emplace leaves an existing entry untouched
    cache_.emplace(cache_key(x), records_.size());
    records_.push_back(std::move(r));
    write_line(records_.back());
    return records_.back().seq;
}

std::uint64_t EvalStore::record(std::span<const double> x, double y, int iteration,
                                EvalSource source) {
    std::lock_guard lock(mutex_);
    return record_locked(x, y, iteration, source);
}

double EvalStore::cached_evaluate(const Model& model, std::span<const double> x, int iteration,
                                  EvalSource source) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(cache_key(x));
        if (it != cache_.end()) {
            ++cache_hits_;
            return records_[it->second].y;
        }
    }
    const double y = model.evaluate(x);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(cache_key(x));
    if (it != cache_.end()) {
        ++cache_hits_;
        return records_[it->second].y;
    }
    ++model_calls_;
    record_locked(x, y, iteration, source);
    return y;
}

std::vector<DataPoint> EvalStore::query_all() const {
    std::lock_guard lock(mutex_);
    std::vector<DataPoint> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back({r.x, r.y});
    return out;
}

std::vector<DataPoint> EvalStore::query_iteration(int iteration) const {
    std::lock_guard lock(mutex_);
    std::vector<DataPoint> out;
    for (const auto& r : records_)
        if (r.iteration == iteration) out.push_back({r.x, r.y});
    return out;
}

std::vector<std::vector<DataPoint>> EvalStore::query_last_iterations(int n) const {
    const int last = max_iteration();
    std::vector<std::vector<DataPoint>> out;
    if (last < 0 || n < 1) return out;
    const int first = std::max(0, last - n + 1);
    for (int i = first; i <= last; ++i) out.push_back(query_iteration(i));
    return out;
}

std::vector<EvalRecord> EvalStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t EvalStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

int EvalStore::max_iteration() const {
    std::lock_guard lock(mutex_);
    int m = -1;
    for (const auto& r : records_) m = std::max(m, r.iteration);
    return m;
}

std::uint64_t EvalStore::model_calls() const {
    std::lock_guard lock(mutex_);
    return model_calls_;
}

std::uint64_t EvalStore::cache_hits() const {
    std::lock_guard lock(mutex_);
    return cache_hits_;
}

StoreFingerprint EvalStore::fingerprint() const {
    std::lock_guard lock(mutex_);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    for (const auto& r : records_) {
        for (double v : r.x) mix(double_bits(v));
        mix(double_bits(r.y));
    }
    return {records_.size(), h};
}

void EvalStore::attach_file(const std::string& path) {
    std::lock_guard lock(mutex_);
    sink_.open(path, std::ios::trunc);
    if (!sink_) throw std::runtime_error("eval store: cannot open " + path);
    for (const auto& r : records_) write_line(r);
}

void EvalStore::save(const std::string& path) const {
    std::lock_guard lock(mutex_);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("eval store: cannot open " + path);
    for (const auto& r : records_) {
        std::string line = "{\"x\":[";
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            if (i) line += ',';
            append_number(line, r.x[i]);
        }
        line += "],\"y\":";
        append_number(line, r.y);
        line += ",\"iter\":" + std::to_string(r.iteration);
        line += ",\"src\":\"" + to_string(r.source) + "\"";
        line += ",\"seq\":" + std::to_string(r.seq) + "}\n";
        out << line;
    }
    if (!out) throw std::runtime_error("eval store: write failed for " + path);
}

EvalStore EvalStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("eval store: cannot open " + path);
    std::vector<EvalRecord> parsed;
    std::string line;
    std::size_t lineno = 0;
    bool dropped_tail = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        bool ok = !j.is_discarded() && j.is_object() && j.contains("x") && j.contains("y") &&
                  j.contains("iter") && j.contains("src") && j.contains("seq");
        if (!ok) {
            // only a truncated final line is tolerated
            if (in.peek() == std::char_traits<char>::eof()) {
                std::cerr << "eval store: dropping truncated final line " << lineno << " of "
                          << path << "\n";
                dropped_tail = true;
                break;
            }
            throw std::runtime_error("eval store: malformed record at line " +
                                     std::to_string(lineno) + " of " + path);
        }
        EvalRecord r;
        r.x = j.at("x").get<std::vector<double>>();
        r.y = j.at("y").get<double>();
        r.iteration = j.at("iter").get<int>();
        r.source = eval_source_from_string(j.at("src").get<std::string>());
        r.seq = j.at("seq").get<std::uint64_t>();
        parsed.push_back(std::move(r));
    }
    (void)dropped_tail;
    if (parsed.empty()) throw std::runtime_error("eval store: no records in " + path);
    EvalStore store(static_cast<int>(parsed.front().x.size()));
    for (auto& r : parsed) {
        if (static_cast<int>(r.x.size()) != store.dim_)
            throw std::runtime_error("eval store: inconsistent dimension in " + path);
        store.cache_.emplace(cache_key(r.x), store.records_.size());
        store.records_.push_back(std::move(r));
    }
    return store;
}

}  // namespace surval
