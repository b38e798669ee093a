#pragma once

#include <psox/experiment.hpp>
#include <psox/stats.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace psox {

enum class NumberFormat { scientific, compact };

struct AnalyzeOptions {
    std::string control_operator = "PSOX";
    double alpha = 0.05;
    NumberFormat format = NumberFormat::scientific;
};

/// Results for one (problem, mutation) family of cells.
struct FamilyReport {
    int problem = 0;
    std::string mutation;
    std::vector<const StoredCell*> cells;     // in bundle order
    std::vector<std::string> incomplete;      // labels of cells lacking full traces
    std::optional<stats::StatReport> report;  // over the complete cells
};

inline constexpr const char* dunnett_orientation =
    "one-sided: H1 treatment mean > control mean; '+' means the control is significantly better (minimization)";

namespace detail {

inline std::string fmt_number(double v, NumberFormat f) { return f == NumberFormat::compact ? format_compact(v) : format_sci(v); }

inline std::string fmt_p(double p, NumberFormat f)
{
    if (std::isnan(p)) return "-";
    if (f == NumberFormat::compact) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", p);
        return buf;
    }
    return format_sci(p);
}

}  // namespace detail

/// Groups cells by (problem, mutation) and runs the two-stage statistics on each family.
inline std::vector<FamilyReport> build_family_reports(const StoredBundle& bundle, const AnalyzeOptions& options)
{
    const auto& cfg = bundle.config();
    const std::uint64_t mc_seed = cfg.at("seed").get<std::uint64_t>();
    const std::size_t mc_samples = cfg.value("mc_samples", stats::default_mc_samples);

    std::vector<FamilyReport> families;
    std::map<std::pair<int, std::string>, std::size_t> index;
    for (const auto& cell : bundle.cells) {
        const auto key = std::make_pair(cell.problem, cell.mutation);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, families.size()).first;
            families.push_back({cell.problem, cell.mutation, {}, {}, std::nullopt});
        }
        families[it->second].cells.push_back(&cell);
    }

    for (std::size_t f = 0; f < families.size(); ++f) {
        auto& fam = families[f];
        std::vector<stats::SampleGroup> groups;
        for (const auto* cell : fam.cells) {
            if (!cell->complete) {
                fam.incomplete.push_back(cell->label);
                continue;
            }
            groups.push_back({cell->label, cell->final_values()});
        }
        if (groups.empty()) continue;
        const std::string control = options.control_operator + "-" + fam.mutation;
        const bool has_control = std::any_of(groups.begin(), groups.end(),
                                             [&](const stats::SampleGroup& g) { return g.label == control; });
        // Each family gets its own reproducible Monte Carlo stream.
        RngStream rng(mc_seed + 7919 * static_cast<std::uint64_t>(f + 1));
        if (has_control) {
            fam.report = stats::build_report(groups, control, options.alpha, rng, mc_samples);
        } else {
            // No control: omnibus test only.
            stats::StatReport r;
            for (const auto& g : groups) r.groups.push_back({g.label, g.values.size(), stats::summarize(g.values)});
            const bool testable = groups.size() >= 2 && std::all_of(groups.begin(), groups.end(), [](const auto& g) {
                                      return g.values.size() >= 2;
                                  });
            if (testable) r.kruskal = stats::kruskal_wallis(groups, options.alpha);
            fam.report = std::move(r);
        }
    }
    return families;
}

/// Writes summary.csv, dunnett.csv, kruskal.csv and analysis.json into `out_dir`.
inline std::vector<FamilyReport> analyze(const fs::path& bundle_dir, const AnalyzeOptions& options = {},
                                         const fs::path& out_dir = {})
{
    const auto bundle = read_bundle(bundle_dir);
    auto families = build_family_reports(bundle, options);
    const fs::path dir = out_dir.empty() ? bundle_dir : out_dir;
    fs::create_directories(dir);
    const auto f = options.format;

    std::ofstream summary(dir / "summary.csv", std::ios::binary);
    std::ofstream dunnett(dir / "dunnett.csv", std::ios::binary);
    std::ofstream kruskal(dir / "kruskal.csv", std::ios::binary);
    if (!summary || !dunnett || !kruskal) throw std::runtime_error("cannot write analysis files in " + dir.string());
    summary << "problem,operator,mutation,mean,std,kw_flag\n";
    dunnett << "problem,treatment,p_value,flag\n";
    kruskal << "problem,mutation,h,p_value,flag\n";

    for (const auto& fam : families) {
        const char kw = fam.report ? stats::flag_char(fam.report->kruskal_flag()) : '-';
        for (const auto* cell : fam.cells) {
            summary << fam.problem << ',' << cell->op << ',' << cell->mutation << ',';
            const stats::GroupStats* gs = nullptr;
            if (fam.report)
                for (const auto& g : fam.report->groups)
                    if (g.label == cell->label) gs = &g;
            if (gs)
                summary << detail::fmt_number(gs->summary.mean, f) << ',' << detail::fmt_number(gs->summary.std, f) << ','
                        << kw << '\n';
            else
                summary << "NA,NA,incomplete\n";
        }
        if (fam.report && fam.report->kruskal) {
            const auto& k = *fam.report->kruskal;
            kruskal << fam.problem << ',' << fam.mutation << ',' << detail::fmt_number(k.h, f) << ','
                    << detail::fmt_p(k.p, f) << ',' << stats::flag_char(k.flag) << '\n';
        } else {
            kruskal << fam.problem << ',' << fam.mutation << ",-,-,-\n";
        }
        if (fam.report)
            for (const auto& d : fam.report->dunnett)
                dunnett << fam.problem << ',' << d.label << ',' << detail::fmt_p(d.p, f) << ','
                        << stats::flag_char(d.flag) << '\n';
        for (const auto& label : fam.incomplete) dunnett << fam.problem << ',' << label << ",-,incomplete\n";
    }

    nlohmann::json meta;
    meta["control"] = options.control_operator;
    meta["alpha"] = options.alpha;
    meta["mc_seed"] = bundle.config().at("seed");
    meta["mc_samples"] = bundle.config().value("mc_samples", stats::default_mc_samples);
    meta["dunnett_orientation"] = dunnett_orientation;
    meta["format"] = f == NumberFormat::compact ? "compact" : "scientific";
    std::ofstream(dir / "analysis.json", std::ios::binary) << meta.dump(2) << '\n';
    return families;
}

}  // namespace psox
