#pragma once

#include <psox/benchmarks.hpp>
#include <psox/experiment.hpp>
#include <psox/stats.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace psox::plot {

/// One curve: mean value per x with a lower/upper band.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> lower;
    std::vector<double> upper;
};

struct PanelSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool markers = false;  // draw points, e.g. for a handful of sweep rates
};

inline constexpr double panel_width = 560.0;
inline constexpr double panel_height = 380.0;

namespace detail {

inline constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace detail

/// True when every plotted value is strictly positive, so a log axis is usable.
inline bool all_positive(const std::vector<Series>& series)
{
    for (const auto& s : series)
        for (double v : s.mean)
            if (!(v > 0.0)) return false;
    return !series.empty();
}

/// Renders one panel as an SVG <g> element positioned at (ox, oy).
inline std::string render_panel(const std::vector<Series>& series, const PanelSpec& spec, double ox = 0.0,
                                double oy = 0.0)
{
    using detail::num;
    const double left = 70, right = 150, top = 36, bottom = 48;
    const double pw = panel_width - left - right, ph = panel_height - top - bottom;
    const bool log_y = all_positive(series);

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    double min_positive = xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            for (double v : {s.mean[i], s.lower[i], s.upper[i]}) {
                if (!std::isfinite(v)) continue;
                if (v > 0.0) min_positive = std::min(min_positive, v);
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1, min_positive = 1;
    auto ty = [&](double v) {
        if (log_y) return std::log10(std::max(v, min_positive));
        return v;
    };
    double y0 = log_y ? std::log10(min_positive) : ymin;
    double y1 = ty(ymax);
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return top + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };

    std::ostringstream g;
    g << "<g transform=\"translate(" << num(ox) << ',' << num(oy) << ")\">\n";
    g << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"white\" stroke=\"#333\"/>\n";
    g << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape(spec.title) << "</text>\n";
    g << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(panel_height - 10)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::escape(spec.x_label) << "</text>\n";
    g << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\" "
      << "font-size=\"12\">" << detail::escape(spec.y_label) << (log_y ? " (log)" : "") << "</text>\n";

    // y ticks
    for (int t = 0; t <= 4; ++t) {
        const double tv = y0 + (y1 - y0) * t / 4.0;
        const double yy = top + (1.0 - t / 4.0) * ph;
        const double shown = log_y ? std::pow(10.0, tv) : tv;
        g << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(yy) << "\" x2=\"" << num(left) << "\" y2=\"" << num(yy)
          << "\" stroke=\"#333\"/><text x=\"" << num(left - 6) << "\" y=\"" << num(yy + 4)
          << "\" text-anchor=\"end\" font-size=\"10\">" << detail::tick_label(shown) << "</text>\n";
    }
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double xx = px(xv);
        g << "<line x1=\"" << num(xx) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(xx) << "\" y2=\""
          << num(top + ph + 4) << "\" stroke=\"#333\"/><text x=\"" << num(xx) << "\" y=\"" << num(top + ph + 16)
          << "\" text-anchor=\"middle\" font-size=\"10\">" << detail::tick_label(xv) << "</text>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = detail::palette[si % detail::palette.size()];
        if (s.x.empty()) continue;
        std::ostringstream band;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            band << (i == 0 ? "M" : " L") << num(px(s.x[i])) << ',' << num(py(s.upper[i]));
        for (std::size_t i = s.x.size(); i-- > 0;) band << " L" << num(px(s.x[i])) << ',' << num(py(s.lower[i]));
        band << " Z";
        g << "<path class=\"band\" data-label=\"" << detail::escape(s.label) << "\" d=\"" << band.str() << "\" fill=\""
          << color << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
        std::ostringstream line;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            line << (i == 0 ? "M" : " L") << num(px(s.x[i])) << ',' << num(py(s.mean[i]));
        g << "<path class=\"mean\" data-label=\"" << detail::escape(s.label) << "\" d=\"" << line.str()
          << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
        if (spec.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                g << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.mean[i])) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(si);
        g << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 30)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\""
          << num(left + pw + 34) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">" << detail::escape(s.label)
          << "</text>\n";
    }
    g << "</g>\n";
    return g.str();
}

/// Lays panels out in a grid of `columns` and wraps them in an SVG document.
inline std::string render_document(const std::vector<std::string>& panels, std::size_t columns = 1)
{
    columns = std::max<std::size_t>(1, std::min(columns, panels.size()));
    const std::size_t rows = (panels.size() + columns - 1) / columns;
    std::ostringstream doc;
    doc << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(panel_width * columns) << "\" height=\""
        << detail::num(panel_height * rows) << "\" font-family=\"sans-serif\">\n";
    for (const auto& p : panels) doc << p;
    doc << "</svg>\n";
    return doc.str();
}

inline void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

/// Mean and +-1 std per generation across the runs of one cell.
inline Series convergence_series(const StoredCell& cell)
{
    Series s;
    s.label = cell.label;
    std::size_t length = 0;
    for (const auto& r : cell.runs) length = std::max(length, r.size());
    std::vector<double> column;
    for (std::size_t g = 0; g < length; ++g) {
        column.clear();
        for (const auto& r : cell.runs)
            if (g < r.size()) column.push_back(r[g]);
        const auto sm = stats::summarize(column);
        s.x.push_back(static_cast<double>(g + 1));
        s.mean.push_back(sm.mean);
        s.lower.push_back(sm.mean - sm.std);
        s.upper.push_back(sm.mean + sm.std);
    }
    return s;
}

/// One convergence panel per requested problem (all problems when empty), plus a combined grid.
/// Returns the files written; throws when no traces match.
inline std::vector<fs::path> plot_convergence(const fs::path& bundle_dir, const std::vector<int>& problems,
                                              const fs::path& output_dir)
{
    const auto bundle = read_bundle(bundle_dir);
    std::vector<int> wanted = problems;
    if (wanted.empty())
        for (const auto& c : bundle.cells)
            if (std::find(wanted.begin(), wanted.end(), c.problem) == wanted.end()) wanted.push_back(c.problem);

    fs::create_directories(output_dir);
    std::vector<fs::path> written;
    std::vector<std::string> grid;
    for (int p : wanted) {
        std::vector<Series> series;
        for (const auto& c : bundle.cells)
            if (c.problem == p && !c.runs.empty()) series.push_back(convergence_series(c));
        if (series.empty()) continue;
        PanelSpec spec{"Problem " + std::to_string(p) + ": " + std::string(benchmark_name(p)), "generation",
                       "mean best-so-far objective"};
        char name[64];
        std::snprintf(name, sizeof name, "convergence_p%02d.svg", p);
        write_file(output_dir / name, render_document({render_panel(series, spec)}));
        written.push_back(output_dir / name);
        const std::size_t k = grid.size();
        grid.push_back(render_panel(series, spec, panel_width * static_cast<double>(k % 2),
                                    panel_height * static_cast<double>(k / 2)));
    }
    if (written.empty()) throw std::runtime_error("no traces found for the requested problems");
    if (grid.size() > 1) {
        write_file(output_dir / "convergence.svg", render_document(grid, 2));
        written.push_back(output_dir / "convergence.svg");
    }
    return written;
}

}  // namespace psox::plot
