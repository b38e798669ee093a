#pragma once

#include <psox/config.hpp>
#include <psox/engine.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace psox {

namespace fs = std::filesystem;

/// Environment variable that overrides the worker count.
inline constexpr const char* workers_env = "PSOX_WORKERS";

inline std::size_t default_workers()
{
    if (const char* env = std::getenv(workers_env)) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on a bounded pool. Tasks must not throw.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
}

/// Scientific notation with six significant digits, e.g. 1.23457e-04.
inline std::string format_sci(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

/// Two significant digits in the style of published tables, e.g. 1.7E+00.
inline std::string format_compact(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.1E", v);
    return buf;
}

inline std::string cell_label(CrossoverKind op, MutationKind mut)
{
    return std::string(to_string(op)) + "-" + std::string(to_string(mut));
}

inline std::string trace_file_name(int problem, CrossoverKind op, MutationKind mut)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "p%02d_%s_%s.csv", problem, std::string(to_string(op)).c_str(),
                  std::string(to_string(mut)).c_str());
    return buf;
}

struct CellResult {
    int problem = 0;
    CrossoverKind op = CrossoverKind::psox;
    MutationKind mut = MutationKind::gm;
    std::vector<std::uint64_t> seeds;
    std::vector<RunTrace> traces;
    bool failed = false;
    std::string error;

    [[nodiscard]] std::string label() const { return cell_label(op, mut); }
};

struct ResultsBundle {
    ExperimentConfig config;
    std::vector<CellResult> cells;  // ordered problem-major, then operator, then mutation
};

struct RunOptions {
    std::size_t workers = default_workers();
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Seed of run `run` in cell `cell`: master + cell * runs + run.
constexpr std::uint64_t cell_run_seed(std::uint64_t master, std::size_t cell, std::size_t runs, std::size_t run)
{
    return derive_seed(master, static_cast<std::uint64_t>(cell) * runs + run);
}

/// Executes every (problem, operator, mutation, run) combination. Failures are confined to their cell.
inline ResultsBundle execute_experiment(const ExperimentConfig& cfg, const RunOptions& options = {})
{
    ResultsBundle bundle{cfg, {}};
    for (int p : cfg.problems)
        for (auto op : cfg.operators)
            for (auto mut : cfg.mutations) {
                CellResult cell;
                cell.problem = p;
                cell.op = op;
                cell.mut = mut;
                cell.traces.resize(cfg.runs);
                const std::size_t index = bundle.cells.size();
                for (std::size_t r = 0; r < cfg.runs; ++r) cell.seeds.push_back(cell_run_seed(cfg.seed, index, cfg.runs, r));
                bundle.cells.push_back(std::move(cell));
            }

    const std::size_t total = bundle.cells.size() * cfg.runs;
    std::vector<std::string> errors(total);
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(total, options.workers, [&](std::size_t task) {
        auto& cell = bundle.cells[task / cfg.runs];
        const std::size_t run = task % cfg.runs;
        try {
            cell.traces[run] = run_ga(cfg.cell_config(cell.problem, cell.op, cell.mut, cell.seeds[run]));
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
        const std::size_t finished = ++done;
        if (options.progress) {
            std::lock_guard lock(progress_mutex);
            options.progress(finished, total);
        }
    });
    for (std::size_t task = 0; task < total; ++task) {
        if (errors[task].empty()) continue;
        auto& cell = bundle.cells[task / cfg.runs];
        if (!cell.failed) cell.error = errors[task];
        cell.failed = true;
    }
    return bundle;
}

/// Trace CSV: columns run,generation,best_so_far; generation counts from 1.
inline void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces)
{
    out << "run,generation,best_so_far\n";
    for (std::size_t r = 0; r < traces.size(); ++r) {
        const auto& best = traces[r].best_per_generation;
        for (std::size_t g = 0; g < best.size(); ++g) out << r << ',' << (g + 1) << ',' << format_sci(best[g]) << '\n';
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg)
{
    nlohmann::json j;
    j["name"] = cfg.name;
    j["scale"] = std::string(to_string(cfg.scale));
    j["problems"] = cfg.problems;
    j["dimension"] = cfg.dimension;
    std::vector<std::string> ops, muts;
    for (auto op : cfg.operators) ops.emplace_back(to_string(op));
    for (auto m : cfg.mutations) muts.emplace_back(to_string(m));
    j["operators"] = ops;
    j["mutations"] = muts;
    j["population_size"] = cfg.population_size;
    j["generations"] = cfg.generations;
    j["runs"] = cfg.runs;
    j["seed"] = cfg.seed;
    j["alpha"] = cfg.alpha;
    j["elitism"] = cfg.elitism;
    j["tournament_size"] = cfg.tournament_size;
    j["mc_samples"] = cfg.mc_samples;
    const auto& c = cfg.crossover;
    j["crossover"] = {{"rate", c.crossover_rate}, {"ax_alpha", c.ax_alpha},   {"blx_alpha", c.blx_alpha},
                      {"sbx_eta", c.sbx_eta},     {"laplace_a", c.laplace_a}, {"laplace_b", c.laplace_b},
                      {"psox_w", c.psox_w},       {"psox_c1", c.psox_c1},     {"psox_c2", c.psox_c2},
                      {"psox_draw", c.psox_draw == PsoxDraw::per_gene ? "per_gene" : "per_individual"}};
    const auto& m = cfg.mutation;
    j["mutation"] = {{"rate", m.rate},
                     {"gm_sigma_fraction", m.gm_sigma_fraction},
                     {"num_b", m.num_b},
                     {"scope", m.scope == MutationScope::per_gene ? "per_gene" : "per_individual"}};
    return j;
}

inline constexpr const char* manifest_name = "manifest.json";
inline constexpr const char* traces_dir = "traces";

/// Writes traces/<cell>.csv for every successful cell, then manifest.json.
inline void write_bundle(const ResultsBundle& bundle, const fs::path& dir)
{
    fs::create_directories(dir / traces_dir);
    nlohmann::json manifest;
    manifest["format"] = "psox-bundle/1";
    manifest["config"] = config_to_json(bundle.config);
    manifest["cells"] = nlohmann::json::array();
    for (const auto& cell : bundle.cells) {
        nlohmann::json c;
        c["problem"] = cell.problem;
        c["operator"] = std::string(to_string(cell.op));
        c["mutation"] = std::string(to_string(cell.mut));
        c["label"] = cell.label();
        c["seeds"] = cell.seeds;
        if (cell.failed) {
            c["status"] = "failed";
            c["error"] = cell.error;
        } else {
            const auto name = trace_file_name(cell.problem, cell.op, cell.mut);
            std::ofstream out(dir / traces_dir / name, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + (dir / traces_dir / name).string());
            write_trace_csv(out, cell.traces);
            c["status"] = "ok";
            c["file"] = std::string(traces_dir) + "/" + name;
            std::vector<double> finals;
            std::size_t evaluations = 0;
            for (const auto& t : cell.traces) {
                finals.push_back(t.final_best.fitness);
                evaluations += t.evaluations;
            }
            c["final_best"] = finals;
            c["evaluations"] = evaluations;
        }
        manifest["cells"].push_back(std::move(c));
    }
    std::ofstream out(dir / manifest_name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / manifest_name).string());
    out << manifest.dump(2) << '\n';
}

/// Runs the experiment described by `cfg` and persists it under cfg.output_dir.
inline ResultsBundle run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {})
{
    auto bundle = execute_experiment(cfg, options);
    write_bundle(bundle, cfg.output_dir);
    return bundle;
}

inline ResultsBundle run_experiment(const fs::path& config_path, const RunOptions& options = {})
{
    return run_experiment(load_config(config_path), options);
}

// ---------------------------------------------------------------------------
// Reading bundles back

/// One cell as read from disk: per-run best-so-far traces.
struct StoredCell {
    int problem = 0;
    std::string op;
    std::string mutation;
    std::string label;
    bool complete = false;
    std::vector<std::vector<double>> runs;

    /// Last best-so-far value of every run; empty runs are skipped.
    [[nodiscard]] std::vector<double> final_values() const
    {
        std::vector<double> out;
        for (const auto& r : runs)
            if (!r.empty()) out.push_back(r.back());
        return out;
    }
};

struct StoredBundle {
    nlohmann::json manifest;
    std::vector<StoredCell> cells;

    [[nodiscard]] const nlohmann::json& config() const { return manifest.at("config"); }
};

/// Parses a trace CSV into per-run sequences ordered by generation.
inline std::vector<std::vector<double>> read_trace_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "run,generation,best_so_far")
        throw std::runtime_error("trace CSV: unexpected header");
    std::vector<std::vector<double>> runs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string run_s, gen_s, val_s;
        if (!std::getline(row, run_s, ',') || !std::getline(row, gen_s, ',') || !std::getline(row, val_s))
            throw std::runtime_error("trace CSV: malformed row '" + line + "'");
        const auto run = std::stoul(run_s);
        const auto gen = std::stoul(gen_s);
        if (runs.size() <= run) runs.resize(run + 1);
        if (gen != runs[run].size() + 1) throw std::runtime_error("trace CSV: generations out of order");
        runs[run].push_back(std::stod(val_s));
    }
    return runs;
}

inline StoredBundle read_bundle(const fs::path& dir)
{
    std::ifstream in(dir / manifest_name);
    if (!in) throw std::runtime_error("no bundle manifest at " + (dir / manifest_name).string());
    StoredBundle bundle;
    bundle.manifest = nlohmann::json::parse(in);
    const std::size_t expected_runs = bundle.config().at("runs").get<std::size_t>();
    for (const auto& c : bundle.manifest.at("cells")) {
        StoredCell cell;
        cell.problem = c.at("problem").get<int>();
        cell.op = c.at("operator").get<std::string>();
        cell.mutation = c.at("mutation").get<std::string>();
        cell.label = c.at("label").get<std::string>();
        if (c.value("status", "") == "ok" && c.contains("file")) {
            std::ifstream trace(dir / c.at("file").get<std::string>());
            if (trace) {
                try {
                    cell.runs = read_trace_csv(trace);
                    cell.complete = cell.runs.size() == expected_runs;
                } catch (const std::exception&) {
                    cell.complete = false;
                }
            }
        }
        bundle.cells.push_back(std::move(cell));
    }
    return bundle;
}

}  // namespace psox
