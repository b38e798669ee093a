// psox: command-line harness for running, analyzing, plotting and sweeping experiments.
#include <psox/psox.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

std::vector<int> parse_problems(const std::string& text)
{
    if (text.empty()) return {};
    return psox::detail::parse_problem_list("problems", text);
}

psox::RunOptions run_options(bool quiet)
{
    psox::RunOptions opts;
    if (!quiet)
        opts.progress = [](std::size_t done, std::size_t total) {
            if (done == total || done % 50 == 0) std::fprintf(stderr, "\r%zu/%zu runs", done, total);
            if (done == total) std::fputc('\n', stderr);
        };
    return opts;
}

psox::ExperimentConfig load(const std::string& path, psox::ConfigKind kind, const std::string& scale,
                            const std::string& output)
{
    auto cfg = psox::load_config(path, kind);
    if (scale == "desk") cfg.apply_scale(psox::Scale::desk);
    else if (!scale.empty() && scale != "full") throw psox::ConfigError("scale", "expected full or desk");
    if (!output.empty()) cfg.output_dir = output;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Real-coded GA experiments with the PSO-inspired crossover"};
    app.require_subcommand(1);

    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "suppress progress output");

    std::string config_path, scale, output, bundle_dir, problems;
    auto* run = app.add_subcommand("run", "run an experiment config and write a results bundle");
    run->add_option("config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--scale", scale, "override the scale preset (full|desk)");
    run->add_option("-o,--output", output, "bundle directory (default: output_dir from the config)");

    psox::AnalyzeOptions analyze_opts;
    std::string format = "sci";
    auto* analyze = app.add_subcommand("analyze", "summary, Kruskal-Wallis and Dunnett tables for a bundle");
    analyze->add_option("bundle", bundle_dir, "results bundle directory")->required()->check(CLI::ExistingDirectory);
    analyze->add_option("--control", analyze_opts.control_operator, "control operator")->capture_default_str();
    analyze->add_option("--alpha", analyze_opts.alpha, "significance level")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));
    analyze->add_option("--format", format, "number format: sci or compact")->check(CLI::IsMember({"sci", "compact"}));
    analyze->add_option("-o,--output", output, "output directory (default: the bundle)");

    auto* plot = app.add_subcommand("plot", "SVG convergence panels for a bundle");
    plot->add_option("bundle", bundle_dir, "results bundle directory")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--problems", problems, "comma list or ranges, e.g. 4,5,7,11 (default: all)");
    plot->add_option("-o,--output", output, "output directory (default: <bundle>/plots)");

    auto* sweep = app.add_subcommand("sweep", "mutation-rate sweep for PSOX-GM");
    sweep->add_option("config", config_path, "sweep config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--output", output, "output directory (default: output_dir from the config)");

    auto* list = app.add_subcommand("list-benchmarks", "print the benchmark registry");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = load(config_path, psox::ConfigKind::experiment, scale, output);
            const auto bundle = psox::run_experiment(cfg, run_options(quiet));
            std::size_t failed = 0;
            for (const auto& c : bundle.cells)
                if (c.failed) {
                    ++failed;
                    std::cerr << "cell " << c.problem << ' ' << c.label() << " failed: " << c.error << '\n';
                }
            std::cout << "wrote " << bundle.cells.size() << " cells to " << cfg.output_dir.string() << '\n';
            return failed == 0 ? 0 : 2;
        }
        if (*analyze) {
            analyze_opts.format = format == "compact" ? psox::NumberFormat::compact : psox::NumberFormat::scientific;
            const auto families = psox::analyze(bundle_dir, analyze_opts, output);
            std::size_t incomplete = 0;
            for (const auto& f : families) incomplete += f.incomplete.size();
            std::cout << "analyzed " << families.size() << " families";
            if (incomplete) std::cout << " (" << incomplete << " incomplete cells)";
            std::cout << '\n';
            return 0;
        }
        if (*plot) {
            const psox::fs::path out = output.empty() ? psox::fs::path(bundle_dir) / "plots" : psox::fs::path(output);
            for (const auto& f : psox::plot::plot_convergence(bundle_dir, parse_problems(problems), out))
                std::cout << f.string() << '\n';
            return 0;
        }
        if (*sweep) {
            const auto cfg = load(config_path, psox::ConfigKind::sweep, "", output);
            const auto result = psox::execute_sweep(cfg, run_options(quiet));
            psox::write_sweep(result, cfg.output_dir);
            for (const auto& row : result.rows)
                std::printf("rate %.3g  problem %2d  mean %s  std %s\n", row.rate, row.problem,
                            psox::format_sci(row.summary.mean).c_str(), psox::format_sci(row.summary.std).c_str());
            return 0;
        }
        if (*list) {
            std::printf("%-3s %-34s %-22s %-9s %s\n", "id", "name", "bounds", "optimum", "modality");
            for (int id = 1; id <= psox::benchmark_count; ++id) {
                const auto spec = psox::benchmark_spec(id, 30);
                char bounds[48];
                std::snprintf(bounds, sizeof bounds, "[%g, %g]", spec.bounds.lower[0], spec.bounds.upper[0]);
                char opt[32] = "n/a";
                if (spec.optimum_location) std::snprintf(opt, sizeof opt, "%g", (*spec.optimum_location)[0]);
                std::printf("%-3d %-34s %-22s x*=%-6s %s%s\n", id, spec.name.c_str(), bounds, opt,
                            spec.modality == psox::Modality::unimodal ? "unimodal" : "multimodal",
                            spec.noisy ? " (noisy)" : "");
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
