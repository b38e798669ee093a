#pragma once

#include <psox/experiment.hpp>
#include <psox/plot.hpp>
#include <psox/stats.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace psox {

struct SweepRow {
    double rate = 0.0;
    int problem = 0;
    stats::Summary summary;
    std::vector<double> finals;  // one per run
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<SweepRow> rows;  // rate-major, then problem
};

/// Runs PSOX-GM at every configured mutation rate on every configured problem.
/// Run r of (rate i, problem p) uses seed master + (i * problems + p) * runs + r.
inline SweepResult execute_sweep(const ExperimentConfig& cfg, const RunOptions& options = {})
{
    if (cfg.mutation_rates.empty()) throw ConfigError("mutation_rates", "at least one rate is required");
    SweepResult result{cfg, {}};
    for (double rate : cfg.mutation_rates)
        for (int p : cfg.problems) result.rows.push_back({rate, p, {}, std::vector<double>(cfg.runs)});

    const std::size_t total = result.rows.size() * cfg.runs;
    std::vector<std::string> errors(total);
    parallel_for(total, options.workers, [&](std::size_t task) {
        const std::size_t row_index = task / cfg.runs, run = task % cfg.runs;
        auto& row = result.rows[row_index];
        try {
            auto gc = cfg.cell_config(row.problem, CrossoverKind::psox, MutationKind::gm,
                                      cell_run_seed(cfg.seed, row_index, cfg.runs, run));
            gc.mutation.rate = row.rate;
            row.finals[run] = run_ga(gc).final_best.fitness;
        } catch (const std::exception& e) {
            errors[task] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep run failed: " + e);
    for (auto& row : result.rows) row.summary = stats::summarize(row.finals);
    return result;
}

/// Writes sweep.csv (rate,problem,mean,std), sweep_runs.csv and one sweep_pNN.svg per problem.
inline void write_sweep(const SweepResult& result, const fs::path& dir)
{
    fs::create_directories(dir);
    std::ofstream summary(dir / "sweep.csv", std::ios::binary);
    std::ofstream runs(dir / "sweep_runs.csv", std::ios::binary);
    if (!summary || !runs) throw std::runtime_error("cannot write sweep files in " + dir.string());
    summary << "rate,problem,mean,std\n";
    runs << "rate,problem,run,final_best\n";
    for (const auto& row : result.rows) {
        summary << format_sci(row.rate) << ',' << row.problem << ',' << format_sci(row.summary.mean) << ','
                << format_sci(row.summary.std) << '\n';
        for (std::size_t r = 0; r < row.finals.size(); ++r)
            runs << format_sci(row.rate) << ',' << row.problem << ',' << r << ',' << format_sci(row.finals[r]) << '\n';
    }

    for (int p : result.config.problems) {
        plot::Series s;
        s.label = "PSOX-GM";
        for (const auto& row : result.rows) {
            if (row.problem != p) continue;
            s.x.push_back(row.rate);
            s.mean.push_back(row.summary.mean);
            s.lower.push_back(row.summary.mean - row.summary.std);
            s.upper.push_back(row.summary.mean + row.summary.std);
        }
        const plot::PanelSpec spec{"Problem " + std::to_string(p) + ": " + std::string(benchmark_name(p)),
                                   "mutation rate", "mean final best", true};
        char name[64];
        std::snprintf(name, sizeof name, "sweep_p%02d.svg", p);
        plot::write_file(dir / name, plot::render_document({plot::render_panel({s}, spec)}));
    }
}

inline SweepResult run_sweep(const fs::path& config_path, const RunOptions& options = {})
{
    const auto cfg = load_config(config_path, ConfigKind::sweep);
    auto result = execute_sweep(cfg, options);
    write_sweep(result, cfg.output_dir);
    return result;
}

}  // namespace psox
