#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "surval/experiment_config.hpp"
#include "surval/workflow.hpp"

namespace fs = std::filesystem;
using namespace surval;

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

OutputPaths run_paths(const std::string& dir) {
    fs::create_directories(dir);
    return {dir + "/eval.db", dir + "/surrogate.json", dir + "/summary.csv"};
}

WorkflowResult execute(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& dir) {
    WorkflowConfig wf = cfg.workflow;
    wf.rng_seed = seed;
    Workflow run(model_registry(cfg.model_id), wf, run_paths(dir));
    return cfg.kind == WorkflowKind::single ? run.run_single() : run.run_asymptotic();
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& preset, const std::string& mode, long long seed_override) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    if (!preset.empty()) {
        cfg.workflow.test_tolerances = ToleranceConfig::preset(preset);
        cfg.workflow.train_tolerances = ToleranceConfig::preset(preset);
    }
    if (!mode.empty()) cfg.workflow.mode = distance_mode_from_string(mode);
    if (seed_override >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed_override)};
    std::string out = !out_override.empty() ? out_override
                      : !cfg.out_dir.empty() ? cfg.out_dir
                                             : std::string("runs/") + cfg.model_id;

    bool all_ok = true;
    for (std::uint64_t seed : cfg.seeds) {
        const std::string dir =
            cfg.seeds.size() == 1 ? out : out + "/seed" + std::to_string(seed);
        const WorkflowResult result = execute(cfg, seed, dir);
        std::cout << cfg.model_id << " seed " << seed << ": " << to_string(result.termination)
                  << ", " << result.total_evaluations << " model evaluations -> " << dir << "\n";
        if (!result.surrogate) all_ok = false;
    }
    return all_ok ? 0 : 1;
}

int cmd_bench_table(const std::string& config_path, const std::string& out_override) {
    BenchConfig bench = BenchConfig::from_file(config_path);
    const std::string out = out_override.empty() ? "bench" : out_override;
    fs::create_directories(out);

    std::string table = "function,ndim,strategy,preset,seed,total_evals,termination,status\n";
    for (const auto& cell : bench.cells) {
        const Model model = model_registry(cell.model_id);
        std::vector<long> totals;
        for (std::uint64_t seed : cell.seeds) {
            const std::string dir = out + "/" + cell.model_id + "_" + cell.strategy + "_" +
                                    cell.preset + "_seed" + std::to_string(seed);
            std::string row = cell.model_id + "," + std::to_string(model.spec.dim) + "," +
                              cell.strategy + "," + cell.preset + "," + std::to_string(seed) + ",";
            try {
                const WorkflowResult result = execute(cell.config, seed, dir);
                totals.push_back(result.total_evaluations);
                row += std::to_string(result.total_evaluations) + "," +
                       to_string(result.termination) + ",ok";
            } catch (const std::exception& e) {
                row += std::string("-1,none,error: ") + e.what();
            }
            table += row + "\n";
            std::cout << row << "\n";
        }
        if (!totals.empty()) {
            std::sort(totals.begin(), totals.end());
            const std::size_t n = totals.size();
            const long median =
                n % 2 ? totals[n / 2] : (totals[n / 2 - 1] + totals[n / 2]) / 2;
            table += cell.model_id + "," + std::to_string(model.spec.dim) + "," + cell.strategy +
                     "," + cell.preset + ",median," + std::to_string(median) + ",,ok\n";
        }
    }
    std::ofstream tf(out + "/table.csv", std::ios::trunc);
    tf << table;
    if (!tf) {
        std::cerr << "failed writing " << out << "/table.csv\n";
        return 1;
    }
    std::cout << "table written to " << out << "/table.csv\n";
    return 0;
}

int cmd_predict(const std::string& surrogate_path, const std::string& points_path,
                const std::string& out_path) {
    const Surrogate s = Surrogate::deserialize(read_file(surrogate_path));
    std::ifstream in(points_path);
    if (!in) throw std::runtime_error("cannot open " + points_path);

    std::ostringstream csv;
    for (int k = 0; k < s.dim(); ++k) csv << "x" << k << ",";
    csv << "yhat\n";
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> x;
        std::stringstream ls(line);
        std::string tok;
        bool numeric = true;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t used = 0;
                x.push_back(std::stod(tok, &used));
            } catch (...) {
                numeric = false;
                break;
            }
        }
        if (!numeric && lineno == 1) continue;  // header line
        if (!numeric || static_cast<int>(x.size()) != s.dim())
            throw std::runtime_error("points file line " + std::to_string(lineno) +
                                     ": expected " + std::to_string(s.dim()) + " numbers");
        for (double v : x) csv << format_number(v) << ",";
        csv << format_number(s.predict(x)) << "\n";
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << csv.str();
        if (!out) throw std::runtime_error("failed writing " + out_path);
    }
    return 0;
}

int cmd_distances(const std::string& surrogate_path, const std::string& evaldb_path,
                  const std::string& mode_name, const std::string& model_id,
                  const std::string& out_path, int threads) {
    const Surrogate s = Surrogate::deserialize(read_file(surrogate_path));
    const EvalStore store = EvalStore::load(evaldb_path);
    const DistanceMode mode = distance_mode_from_string(mode_name);

    Bounds bounds;
    if (!model_id.empty()) {
        bounds = model_registry(model_id).spec.bounds;
    } else {
        // fall back to the data hull
        const auto records = store.snapshot();
        std::vector<double> lo(store.dim()), hi(store.dim());
        for (int k = 0; k < store.dim(); ++k) {
            lo[k] = hi[k] = records.front().x[static_cast<std::size_t>(k)];
            for (const auto& r : records) {
                lo[k] = std::min(lo[k], r.x[static_cast<std::size_t>(k)]);
                hi[k] = std::max(hi[k], r.x[static_cast<std::size_t>(k)]);
            }
            if (lo[k] == hi[k]) hi[k] = lo[k] + 1.0;
        }
        bounds = Bounds(lo, hi);
    }

    const auto records = store.snapshot();
    std::vector<DataPoint> data;
    data.reserve(records.size());
    for (const auto& r : records) data.push_back({r.x, r.y});
    const DistanceReport rep = report(s, data, mode, bounds, threads);

    std::ostringstream csv;
    csv << "seq,delta_y\n";
    for (std::size_t i = 0; i < records.size(); ++i)
        csv << records[i].seq << "," << format_number(rep.per_point[i]) << "\n";
    csv << "ave," << format_number(rep.ave) << "\n";
    csv << "max," << format_number(rep.max) << "\n";
    csv << "sum," << format_number(rep.sum) << "\n";
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << csv.str();
        if (!out) throw std::runtime_error("failed writing " + out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surval: online-learning workbench for validated surrogates"};
    app.require_subcommand(1);

    std::string config_path, out_dir, preset, mode;
    long long seed_override = -1;

    auto* run = app.add_subcommand("run", "run a workflow from a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--seed", seed_override, "seed override");
    run->add_option("--preset", preset, "tolerance preset override (loose|strict)");
    run->add_option("--mode", mode, "distance mode override (vertical|graphical)");

    auto* bench = app.add_subcommand("bench-table", "run a grid of cells and tabulate totals");
    bench->add_option("--config", config_path, "bench config (JSON)")->required();
    bench->add_option("--out", out_dir, "output directory");

    std::string surrogate_path, points_path, evaldb_path, model_id, out_path;
    std::string dist_mode = "graphical";
    int threads = 0;

    auto* predict = app.add_subcommand("predict", "evaluate a stored surrogate at points");
    predict->add_option("--surrogate", surrogate_path, "surrogate JSON document")->required();
    predict->add_option("--points", points_path, "CSV of inputs, one point per line")->required();
    predict->add_option("--out", out_path, "output CSV (default stdout)");

    auto* distances = app.add_subcommand("distances", "distance report of a surrogate vs a DB");
    distances->add_option("--surrogate", surrogate_path, "surrogate JSON document")->required();
    distances->add_option("--evaldb", evaldb_path, "eval DB file")->required();
    distances->add_option("--mode", dist_mode, "vertical|graphical");
    distances->add_option("--model", model_id, "model id for search bounds (default: data hull)");
    distances->add_option("--out", out_path, "output CSV (default stdout)");
    distances->add_option("--threads", threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir, preset, mode, seed_override);
        if (*bench) return cmd_bench_table(config_path, out_dir);
        if (*predict) return cmd_predict(surrogate_path, points_path, out_path);
        if (*distances)
            return cmd_distances(surrogate_path, evaldb_path, dist_mode, model_id, out_path,
                                 threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
