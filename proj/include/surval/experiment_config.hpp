#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surval/workflow.hpp"

namespace surval {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WorkflowKind { single, asymptotic };

/// Declarative description of one run (or a family of seeded runs), read from
/// a JSON document. Unknown keys are rejected; errors carry the offending
/// JSON pointer.
struct ExperimentConfig {
    std::string model_id;
    WorkflowKind kind = WorkflowKind::asymptotic;
    WorkflowConfig workflow;  // everything except the seed
    std::vector<std::uint64_t> seeds = {0};
    std::string out_dir;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

struct BenchCell {
    std::string model_id;
    std::string strategy;  // "random" or "directed"
    std::string preset;    // "loose" or "strict"
    std::vector<std::uint64_t> seeds;
    ExperimentConfig config;  // fully resolved
};

struct BenchConfig {
    std::vector<BenchCell> cells;

    static BenchConfig from_json_text(const std::string& text);
    static BenchConfig from_file(const std::string& path);
};

/// Resolve "random" / "directed" to the corresponding sampler setup.
SamplerConfig strategy_sampler(const std::string& strategy);

}  // namespace surval
