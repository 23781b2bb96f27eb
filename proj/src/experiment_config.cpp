#include "surval/experiment_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace surval {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config error at " + (where.empty() ? "/" : where) + ": " + what);
}

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.contains(it.key())) fail(where + "/" + it.key(), "unknown key");
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

ToleranceConfig parse_tolerances(const json& j, const std::string& where) {
    require_keys(j, where, {"preset", "form", "tol_ave", "tol_max", "tol_sum", "tol_stop", "M",
                            "N"});
    ToleranceConfig cfg;
    if (j.contains("preset")) {
        const std::string name = as_string(j.at("preset"), where + "/preset");
        try {
            cfg = ToleranceConfig::preset(name);
        } catch (const std::invalid_argument& e) {
            fail(where + "/preset", e.what());
        }
    }
    if (j.contains("form")) {
        try {
            cfg.form = predicate_form_from_string(as_string(j.at("form"), where + "/form"));
        } catch (const std::invalid_argument& e) {
            fail(where + "/form", e.what());
        }
    }
    if (j.contains("tol_ave")) cfg.tol_ave = as_number(j.at("tol_ave"), where + "/tol_ave");
    if (j.contains("tol_max")) cfg.tol_max = as_number(j.at("tol_max"), where + "/tol_max");
    if (j.contains("tol_sum")) cfg.tol_sum = as_number(j.at("tol_sum"), where + "/tol_sum");
    if (j.contains("tol_stop")) cfg.tol_stop = as_number(j.at("tol_stop"), where + "/tol_stop");
    if (j.contains("M")) cfg.extrema_window = as_int(j.at("M"), where + "/M");
    if (j.contains("N")) cfg.score_window = as_int(j.at("N"), where + "/N");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return cfg;
}

SamplerConfig parse_sampler(const json& j, const std::string& where, SamplerConfig cfg) {
    require_keys(j, where,
                 {"strategy", "directed", "n_s", "batch_size", "warm", "pool_size"});
    if (j.contains("strategy")) {
        try {
            cfg.strategy = strategy_from_string(as_string(j.at("strategy"), where + "/strategy"));
        } catch (const std::invalid_argument& e) {
            fail(where + "/strategy", e.what());
        }
    }
    if (j.contains("directed")) cfg.directed = as_bool(j.at("directed"), where + "/directed");
    if (j.contains("n_s")) {
        const json& ns = j.at("n_s");
        if (ns.is_number_integer()) {
            cfg.ensemble_size = ns.get<int>();
            cfg.lattice_bins.clear();
        } else if (ns.is_array()) {
            cfg.lattice_bins.clear();
            for (std::size_t i = 0; i < ns.size(); ++i)
                cfg.lattice_bins.push_back(as_int(ns[i], where + "/n_s/" + std::to_string(i)));
        } else {
            fail(where + "/n_s", "expected an integer or an array of integers");
        }
    }
    if (j.contains("batch_size"))
        cfg.batch_size = as_int(j.at("batch_size"), where + "/batch_size");
    if (j.contains("warm")) cfg.warm = as_int(j.at("warm"), where + "/warm");
    if (j.contains("pool_size")) cfg.pool_size = as_int(j.at("pool_size"), where + "/pool_size");
    return cfg;
}

SolverConfig parse_solver(const json& j, const std::string& where, SolverConfig cfg) {
    require_keys(j, where, {"xtol", "ftol", "max_iterations", "reflection", "expansion",
                            "contraction", "shrink"});
    if (j.contains("xtol")) cfg.xtol = as_number(j.at("xtol"), where + "/xtol");
    if (j.contains("ftol")) cfg.ftol = as_number(j.at("ftol"), where + "/ftol");
    if (j.contains("max_iterations"))
        cfg.max_iterations = as_int(j.at("max_iterations"), where + "/max_iterations");
    if (j.contains("reflection"))
        cfg.reflection = as_number(j.at("reflection"), where + "/reflection");
    if (j.contains("expansion")) cfg.expansion = as_number(j.at("expansion"), where + "/expansion");
    if (j.contains("contraction"))
        cfg.contraction = as_number(j.at("contraction"), where + "/contraction");
    if (j.contains("shrink")) cfg.shrink = as_number(j.at("shrink"), where + "/shrink");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return cfg;
}

Bounds parse_bounds(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected an array of [lo, hi] pairs");
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& pair = j[i];
        const std::string pw = where + "/" + std::to_string(i);
        if (!pair.is_array() || pair.size() != 2) fail(pw, "expected [lo, hi]");
        lo.push_back(as_number(pair[0], pw + "/0"));
        hi.push_back(as_number(pair[1], pw + "/1"));
    }
    try {
        return Bounds(lo, hi);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

std::vector<std::uint64_t> parse_seeds(const json& j, const std::string& where) {
    std::vector<std::uint64_t> seeds;
    if (j.is_number_integer()) {
        seeds.push_back(j.get<std::uint64_t>());
    } else if (j.is_array() && !j.empty()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            const json& s = j[i];
            if (!s.is_number_integer()) fail(where + "/" + std::to_string(i), "expected an integer");
            seeds.push_back(s.get<std::uint64_t>());
        }
    } else {
        fail(where, "expected an integer or a non-empty array of integers");
    }
    return seeds;
}

const std::set<std::string> kExperimentKeys = {
    "model", "workflow", "bounds", "sampler", "solver", "test", "train", "distance_mode",
    "train_budget", "max_iterations", "fit_cap", "report_cap", "threads", "seed", "seeds", "out"};

ExperimentConfig parse_experiment(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    require_keys(j, where, kExperimentKeys);
    if (!j.contains("model")) fail(where + "/model", "required key is missing");

    ExperimentConfig cfg;
    cfg.model_id = as_string(j.at("model"), where + "/model");
    try {
        model_registry(cfg.model_id);
    } catch (const std::invalid_argument& e) {
        fail(where + "/model", e.what());
    }
    cfg.workflow.model_id = cfg.model_id;

    if (j.contains("workflow")) {
        const std::string kind = as_string(j.at("workflow"), where + "/workflow");
        if (kind == "single")
            cfg.kind = WorkflowKind::single;
        else if (kind == "asymptotic")
            cfg.kind = WorkflowKind::asymptotic;
        else
            fail(where + "/workflow", "expected \"single\" or \"asymptotic\"");
    }
    if (j.contains("bounds"))
        cfg.workflow.bounds_override = parse_bounds(j.at("bounds"), where + "/bounds");
    if (j.contains("sampler"))
        cfg.workflow.sampler = parse_sampler(j.at("sampler"), where + "/sampler",
                                             cfg.workflow.sampler);
    if (j.contains("solver"))
        cfg.workflow.solver = parse_solver(j.at("solver"), where + "/solver", cfg.workflow.solver);
    if (j.contains("test"))
        cfg.workflow.test_tolerances = parse_tolerances(j.at("test"), where + "/test");
    if (j.contains("train"))
        cfg.workflow.train_tolerances = parse_tolerances(j.at("train"), where + "/train");
    if (j.contains("distance_mode")) {
        try {
            cfg.workflow.mode = distance_mode_from_string(
                as_string(j.at("distance_mode"), where + "/distance_mode"));
        } catch (const std::invalid_argument& e) {
            fail(where + "/distance_mode", e.what());
        }
    }
    if (j.contains("train_budget"))
        cfg.workflow.train_budget = as_int(j.at("train_budget"), where + "/train_budget");
    if (j.contains("max_iterations"))
        cfg.workflow.max_iterations = as_int(j.at("max_iterations"), where + "/max_iterations");
    if (j.contains("fit_cap"))
        cfg.workflow.fit_cap =
            static_cast<std::size_t>(as_int(j.at("fit_cap"), where + "/fit_cap"));
    if (j.contains("report_cap"))
        cfg.workflow.report_cap =
            static_cast<std::size_t>(as_int(j.at("report_cap"), where + "/report_cap"));
    if (j.contains("threads")) cfg.workflow.threads = as_int(j.at("threads"), where + "/threads");
    if (j.contains("seed") && j.contains("seeds"))
        fail(where + "/seeds", "give either seed or seeds, not both");
    if (j.contains("seed")) cfg.seeds = parse_seeds(j.at("seed"), where + "/seed");
    if (j.contains("seeds")) cfg.seeds = parse_seeds(j.at("seeds"), where + "/seeds");
    if (j.contains("out")) cfg.out_dir = as_string(j.at("out"), where + "/out");

    try {
        cfg.workflow.validate();
        cfg.workflow.sampler.validate(model_registry(cfg.model_id).spec.dim);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return cfg;
}

json parse_document(const std::string& text) {
    json j = json::parse(text, nullptr, false, true);
    if (j.is_discarded()) throw ConfigError("config error: not valid JSON");
    return j;
}

}  // namespace

SamplerConfig strategy_sampler(const std::string& strategy) {
    SamplerConfig cfg;
    if (strategy == "random") {
        cfg.strategy = SamplingStrategy::random;
        cfg.directed = false;
        cfg.batch_size = 500;
    } else if (strategy == "directed") {
        cfg.strategy = SamplingStrategy::sparsity;
        cfg.directed = true;
        cfg.ensemble_size = 16;
    } else {
        throw ConfigError("unknown strategy: " + strategy + " (expected random or directed)");
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    return parse_experiment(parse_document(text), "");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

BenchConfig BenchConfig::from_json_text(const std::string& text) {
    json j = parse_document(text);
    if (!j.is_object()) throw ConfigError("config error at /: expected an object");
    if (!j.contains("cells") || !j.at("cells").is_array() || j.at("cells").empty())
        throw ConfigError("config error at /cells: expected a non-empty array");

    // everything except "cells" is the shared base config
    json base = j;
    base.erase("cells");

    BenchConfig bench;
    for (std::size_t i = 0; i < j.at("cells").size(); ++i) {
        const std::string where = "/cells/" + std::to_string(i);
        const json& cell = j.at("cells")[i];
        if (!cell.is_object()) throw ConfigError("config error at " + where + ": expected object");
        for (auto it = cell.begin(); it != cell.end(); ++it) {
            static const std::set<std::string> extra = {"strategy", "preset"};
            if (!kExperimentKeys.contains(it.key()) && !extra.contains(it.key()))
                throw ConfigError("config error at " + where + "/" + it.key() + ": unknown key");
        }
        if (!cell.contains("model"))
            throw ConfigError("config error at " + where + "/model: required key is missing");
        if (!cell.contains("strategy"))
            throw ConfigError("config error at " + where + "/strategy: required key is missing");
        if (!cell.contains("preset"))
            throw ConfigError("config error at " + where + "/preset: required key is missing");

        BenchCell out;
        out.model_id = cell.at("model").get<std::string>();
        out.strategy = cell.at("strategy").get<std::string>();
        out.preset = cell.at("preset").get<std::string>();

        json merged = base;
        for (auto it = cell.begin(); it != cell.end(); ++it) {
            if (it.key() == "strategy" || it.key() == "preset") continue;
            merged[it.key()] = it.value();
        }
        // preset resolves test/train tolerances unless given explicitly
        if (!merged.contains("test")) merged["test"] = {{"preset", out.preset}};
        if (!merged.contains("train")) merged["train"] = {{"preset", out.preset}};
        out.config = parse_experiment(merged, where);
        out.config.workflow.sampler = strategy_sampler(out.strategy);
        if (cell.contains("sampler") || base.contains("sampler")) {
            const json& sj = cell.contains("sampler") ? cell.at("sampler") : base.at("sampler");
            out.config.workflow.sampler =
                parse_sampler(sj, where + "/sampler", out.config.workflow.sampler);
        }
        try {
            out.config.workflow.sampler.validate(model_registry(out.model_id).spec.dim);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config error at " + where + "/sampler: " + e.what());
        }
        out.seeds = out.config.seeds;
        bench.cells.push_back(std::move(out));
    }
    return bench;
}

BenchConfig BenchConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

}  // namespace surval
