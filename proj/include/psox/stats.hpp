#pragma once

#include <psox/core.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace psox::stats {

/// Outcome of a significance test. `skipped` renders as a dash in reports.
enum class Flag { significant, not_significant, skipped };

inline constexpr char flag_char(Flag f)
{
    switch (f) {
    case Flag::significant: return '+';
    case Flag::not_significant: return '~';
    case Flag::skipped: return '-';
    }
    return '?';
}

inline Flag flag_for(double p, double alpha) { return p < alpha ? Flag::significant : Flag::not_significant; }

struct SampleGroup {
    std::string label;
    std::vector<double> values;
};

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, n - 1 divisor; 0 for a single value
};

/// Mean and sample standard deviation (Welford's update).
inline Summary summarize(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double v : values) {
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    return {mean, n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0};
}

/// Ranks 1..N; tied values share the mean of the positions they occupy.
inline std::vector<double> rank_with_ties(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = mid;
        i = j + 1;
    }
    return ranks;
}

/// Upper tail P(X >= x) of a chi-square variable with `dof` degrees of freedom.
inline double chi_square_upper_tail(double x, double dof)
{
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

struct KruskalResult {
    double h = 0.0;
    double p = 1.0;
    Flag flag = Flag::not_significant;
};

/// Kruskal-Wallis H test with tie correction; p from the chi-square(k - 1) upper tail.
inline KruskalResult kruskal_wallis(std::span<const SampleGroup> groups, double alpha)
{
    if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis: needs at least two groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.values.size() < 2) throw std::invalid_argument("kruskal_wallis: group '" + g.label + "' has < 2 values");
        pooled.insert(pooled.end(), g.values.begin(), g.values.end());
    }
    const auto ranks = rank_with_ties(pooled);
    const double n = static_cast<double>(pooled.size());

    // tie correction 1 - sum(t^3 - t) / (N^3 - N)
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_sum += t * t * t - t;
        i = j;
    }
    const double correction = 1.0 - tie_sum / (n * n * n - n);
    if (correction <= 0.0) return {0.0, 1.0, Flag::not_significant};

    double sum = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double r = 0.0;
        for (std::size_t m = 0; m < g.values.size(); ++m) r += ranks[offset + m];
        sum += r * r / static_cast<double>(g.values.size());
        offset += g.values.size();
    }
    const double h = std::max(0.0, (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction);
    const double p = chi_square_upper_tail(h, static_cast<double>(groups.size() - 1));
    return {h, p, flag_for(p, alpha)};
}

struct DunnettResult {
    std::string label;
    double statistic = 0.0;  // NaN when the pooled variance is zero
    double p = 1.0;
    Flag flag = Flag::not_significant;
};

/// One-sided Dunnett comparison of each treatment against the control.
///
/// The alternative is "treatment mean > control mean": under minimization a `+` means the
/// control is significantly better. Adjusted p-values come from a seeded Monte Carlo
/// estimate of P(max_j T_j >= t_obs), where T_j are correlated t variables sharing the
/// control's sampling noise and the pooled variance estimate.
inline std::vector<DunnettResult> dunnett_one_sided(const SampleGroup& control, std::span<const SampleGroup> treatments,
                                                    double alpha, std::size_t mc_samples, RngStream& rng)
{
    if (control.values.size() < 2) throw std::invalid_argument("dunnett: control needs >= 2 values");
    if (treatments.empty()) return {};
    if (mc_samples == 0) throw std::invalid_argument("dunnett: mc_samples must be positive");

    const double n0 = static_cast<double>(control.values.size());
    const double mean0 = summarize(control.values).mean;
    double ss = 0.0;
    std::size_t total = control.values.size();
    for (double v : control.values) ss += (v - mean0) * (v - mean0);
    std::vector<double> means;
    for (const auto& t : treatments) {
        if (t.values.size() < 2) throw std::invalid_argument("dunnett: treatment '" + t.label + "' has < 2 values");
        const double m = summarize(t.values).mean;
        means.push_back(m);
        for (double v : t.values) ss += (v - m) * (v - m);
        total += t.values.size();
    }
    const std::size_t dof = total - (treatments.size() + 1);
    const double pooled_var = ss / static_cast<double>(dof);

    std::vector<DunnettResult> out;
    out.reserve(treatments.size());
    if (!(pooled_var > 0.0)) {
        // All groups constant: the sign of the difference decides.
        for (std::size_t j = 0; j < treatments.size(); ++j) {
            const double p = means[j] > mean0 ? 0.0 : 1.0;
            out.push_back({treatments[j].label, std::nan(""), p, flag_for(p, alpha)});
        }
        return out;
    }

    const double s = std::sqrt(pooled_var);
    std::vector<double> observed(treatments.size()), inv_sqrt_n(treatments.size()), scale(treatments.size());
    for (std::size_t j = 0; j < treatments.size(); ++j) {
        const double nj = static_cast<double>(treatments[j].values.size());
        const double se = std::sqrt(1.0 / nj + 1.0 / n0);
        observed[j] = (means[j] - mean0) / (s * se);
        inv_sqrt_n[j] = 1.0 / std::sqrt(nj);
        scale[j] = 1.0 / se;
    }

    const double inv_sqrt_n0 = 1.0 / std::sqrt(n0);
    const double df = static_cast<double>(dof);
    std::vector<double> maxima(mc_samples);
    for (auto& mx : maxima) {
        const double z0 = rng.normal() * inv_sqrt_n0;
        const double denom = std::sqrt(rng.chi_squared(df) / df);
        mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < treatments.size(); ++j)
            mx = std::max(mx, (rng.normal() * inv_sqrt_n[j] - z0) * scale[j] / denom);
    }
    std::sort(maxima.begin(), maxima.end());

    for (std::size_t j = 0; j < treatments.size(); ++j) {
        const auto first_ge = std::lower_bound(maxima.begin(), maxima.end(), observed[j]);
        const double p = static_cast<double>(maxima.end() - first_ge) / static_cast<double>(mc_samples);
        out.push_back({treatments[j].label, observed[j], p, flag_for(p, alpha)});
    }
    return out;
}

struct GroupStats {
    std::string label;
    std::size_t count = 0;
    Summary summary;
};

struct StatReport {
    std::vector<GroupStats> groups;
    std::optional<KruskalResult> kruskal;  // empty when the omnibus test is not applicable
    std::vector<DunnettResult> dunnett;    // flags are `skipped` unless the omnibus test is significant
    std::string control_label;

    [[nodiscard]] Flag kruskal_flag() const { return kruskal ? kruskal->flag : Flag::skipped; }
};

inline constexpr std::size_t default_mc_samples = 100000;

/// Two-stage pipeline: summaries and Kruskal-Wallis for all groups, then Dunnett against
/// the control only when Kruskal-Wallis is significant.
inline StatReport build_report(std::span<const SampleGroup> groups, const std::string& control_label, double alpha,
                               RngStream& rng, std::size_t mc_samples = default_mc_samples)
{
    const auto control = std::find_if(groups.begin(), groups.end(),
                                      [&](const SampleGroup& g) { return g.label == control_label; });
    if (control == groups.end()) throw std::invalid_argument("build_report: control '" + control_label + "' not found");

    StatReport report;
    report.control_label = control_label;
    for (const auto& g : groups) report.groups.push_back({g.label, g.values.size(), summarize(g.values)});

    std::vector<SampleGroup> treatments;
    for (const auto& g : groups)
        if (g.label != control_label) treatments.push_back(g);

    const bool testable = groups.size() >= 2 && std::all_of(groups.begin(), groups.end(), [](const SampleGroup& g) {
                              return g.values.size() >= 2;
                          });
    if (testable) report.kruskal = kruskal_wallis(groups, alpha);

    if (report.kruskal_flag() == Flag::significant) {
        report.dunnett = dunnett_one_sided(*control, treatments, alpha, mc_samples, rng);
    } else {
        for (const auto& t : treatments) report.dunnett.push_back({t.label, std::nan(""), std::nan(""), Flag::skipped});
    }
    return report;
}

}  // namespace psox::stats
