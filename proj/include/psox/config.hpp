#pragma once

#include <psox/benchmarks.hpp>
#include <psox/engine.hpp>
#include <psox/operators.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psox {

/// Invalid experiment configuration. `field()` is the dotted key path, e.g. "crossover.sbx_eta".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field))
    {
    }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class Scale { full, desk };

/// Population, generations, and runs for the desk-scale preset.
struct DeskPreset {
    static constexpr std::size_t population_size = 100;
    static constexpr std::size_t generations = 300;
    static constexpr std::size_t runs = 10;
};

enum class ConfigKind { experiment, sweep };

struct ExperimentConfig {
    std::string name = "experiment";
    Scale scale = Scale::full;
    std::vector<int> problems;
    std::size_t dimension = 30;
    std::vector<CrossoverKind> operators;
    std::vector<MutationKind> mutations;
    std::size_t population_size = 300;
    std::size_t generations = 1000;
    std::size_t runs = 30;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    std::size_t elitism = 1;
    std::size_t tournament_size = 3;
    std::size_t mc_samples = 100000;
    std::filesystem::path output_dir = "results";
    std::vector<double> mutation_rates;  // sweep only
    CrossoverConfig crossover;           // parameters shared by every operator kind
    MutationConfig mutation;

    /// Engine configuration for one cell of the experiment grid.
    [[nodiscard]] GaConfig cell_config(int problem, CrossoverKind op, MutationKind mut, std::uint64_t seed_value) const
    {
        GaConfig cfg;
        cfg.objective = benchmark_spec(problem, dimension);
        cfg.population_size = population_size;
        cfg.generations = generations;
        cfg.crossover = crossover;
        cfg.crossover.kind = op;
        cfg.mutation = mutation;
        cfg.mutation.kind = mut;
        cfg.selection_k = tournament_size;
        cfg.seed = seed_value;
        cfg.elitism = elitism;
        return cfg;
    }

    void apply_scale(Scale s)
    {
        scale = s;
        if (s == Scale::desk) {
            population_size = DeskPreset::population_size;
            generations = DeskPreset::generations;
            runs = DeskPreset::runs;
        }
    }
};

inline std::string_view to_string(Scale s) { return s == Scale::desk ? "desk" : "full"; }

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& field, const std::string& text)
{
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw ConfigError(field, "expected a number, got '" + text + "'");
    return value;
}

inline double parse_real(const std::string& field, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a real number, got '" + text + "'");
    }
}

inline std::size_t parse_count(const std::string& field, const std::string& text)
{
    return parse_number<std::size_t>(field, text);
}

/// "1-15", "4,5,7,11", "1-3,9" or "all".
inline std::vector<int> parse_problem_list(const std::string& field, const std::string& text)
{
    std::vector<int> ids;
    if (trim(text) == "all") {
        for (int i = 1; i <= benchmark_count; ++i) ids.push_back(i);
        return ids;
    }
    for (const auto& item : split_list(text)) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const int lo = parse_number<int>(field, trim(item.substr(0, dash)));
            const int hi = parse_number<int>(field, trim(item.substr(dash + 1)));
            if (lo > hi) throw ConfigError(field, "empty range '" + item + "'");
            for (int i = lo; i <= hi; ++i) ids.push_back(i);
        } else {
            ids.push_back(parse_number<int>(field, item));
        }
    }
    for (int id : ids)
        if (id < 1 || id > benchmark_count) throw ConfigError(field, "unknown problem id " + std::to_string(id));
    if (ids.empty()) throw ConfigError(field, "no problems listed");
    return ids;
}

}  // namespace detail

/// Parses the key = value config format (INI sections [crossover] and [mutation]).
inline ExperimentConfig parse_config(std::istream& in, ConfigKind kind = ConfigKind::experiment)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("<file>", "line " + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentConfig cfg;
    if (kind == ConfigKind::sweep) {
        cfg.name = "sweep";
        cfg.problems = {4, 5, 7, 11};
        cfg.population_size = 100;
        cfg.generations = 100;
        cfg.operators = {CrossoverKind::psox};
        cfg.mutations = {MutationKind::gm};
        cfg.mutation_rates = {0.1, 0.4, 0.7, 1.0};
    } else {
        for (int i = 1; i <= benchmark_count; ++i) cfg.problems.push_back(i);
        cfg.operators = {CrossoverKind::ax, CrossoverKind::fx, CrossoverKind::blx_alpha,
                         CrossoverKind::sbx, CrossoverKind::laplace, CrossoverKind::psox};
        cfg.mutations = {MutationKind::num, MutationKind::gm};
    }

    std::optional<Scale> scale;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) {
            const bool xo = key == "crossover";
            if (!xo && key != "mutation") throw ConfigError(key, "unknown section");
            for (const auto& [sub, leaf] : node) {
                const std::string field = key + "." + sub;
                const std::string v = detail::trim(leaf.data());
                if (xo) {
                    auto& c = cfg.crossover;
                    if (sub == "rate") c.crossover_rate = detail::parse_real(field, v);
                    else if (sub == "ax_alpha") c.ax_alpha = detail::parse_real(field, v);
                    else if (sub == "blx_alpha") c.blx_alpha = detail::parse_real(field, v);
                    else if (sub == "sbx_eta") c.sbx_eta = detail::parse_real(field, v);
                    else if (sub == "laplace_a") c.laplace_a = detail::parse_real(field, v);
                    else if (sub == "laplace_b") c.laplace_b = detail::parse_real(field, v);
                    else if (sub == "psox_w") c.psox_w = detail::parse_real(field, v);
                    else if (sub == "psox_c1") c.psox_c1 = detail::parse_real(field, v);
                    else if (sub == "psox_c2") c.psox_c2 = detail::parse_real(field, v);
                    else if (sub == "psox_draw") {
                        if (v == "per_gene") c.psox_draw = PsoxDraw::per_gene;
                        else if (v == "per_individual") c.psox_draw = PsoxDraw::per_individual;
                        else throw ConfigError(field, "expected per_gene or per_individual");
                    } else throw ConfigError(field, "unknown key");
                } else {
                    auto& m = cfg.mutation;
                    if (sub == "rate") m.rate = detail::parse_real(field, v);
                    else if (sub == "gm_sigma_fraction") m.gm_sigma_fraction = detail::parse_real(field, v);
                    else if (sub == "num_b") m.num_b = detail::parse_real(field, v);
                    else if (sub == "scope") {
                        if (v == "per_gene") m.scope = MutationScope::per_gene;
                        else if (v == "per_individual") m.scope = MutationScope::per_individual;
                        else throw ConfigError(field, "expected per_gene or per_individual");
                    } else throw ConfigError(field, "unknown key");
                }
            }
            continue;
        }
        const std::string v = detail::trim(node.data());
        if (key == "name") cfg.name = v;
        else if (key == "scale") {
            if (v == "full" || v == "paper") scale = Scale::full;
            else if (v == "desk") scale = Scale::desk;
            else throw ConfigError(key, "expected full or desk");
        } else if (key == "problems") cfg.problems = detail::parse_problem_list(key, v);
        else if (key == "dimension") cfg.dimension = detail::parse_count(key, v);
        else if (key == "operators") {
            cfg.operators.clear();
            for (const auto& item : detail::split_list(v)) {
                auto k = parse_crossover_kind(item);
                if (!k) throw ConfigError(key, "unknown crossover operator '" + item + "'");
                cfg.operators.push_back(*k);
            }
        } else if (key == "mutations") {
            cfg.mutations.clear();
            for (const auto& item : detail::split_list(v)) {
                auto k = parse_mutation_kind(item);
                if (!k) throw ConfigError(key, "unknown mutation operator '" + item + "'");
                cfg.mutations.push_back(*k);
            }
        } else if (key == "population_size") cfg.population_size = detail::parse_count(key, v);
        else if (key == "generations") cfg.generations = detail::parse_count(key, v);
        else if (key == "runs") cfg.runs = detail::parse_count(key, v);
        else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(key, v);
        else if (key == "alpha") cfg.alpha = detail::parse_real(key, v);
        else if (key == "elitism") cfg.elitism = detail::parse_count(key, v);
        else if (key == "tournament_size") cfg.tournament_size = detail::parse_count(key, v);
        else if (key == "mc_samples") cfg.mc_samples = detail::parse_count(key, v);
        else if (key == "output_dir") cfg.output_dir = v;
        else if (key == "mutation_rates") {
            cfg.mutation_rates.clear();
            for (const auto& item : detail::split_list(v)) cfg.mutation_rates.push_back(detail::parse_real(key, item));
        } else throw ConfigError(key, "unknown key");
    }
    if (scale) cfg.apply_scale(*scale);

    if (cfg.runs == 0) throw ConfigError("runs", "must be >= 1");
    if (cfg.operators.empty()) throw ConfigError("operators", "no operators listed");
    if (cfg.mutations.empty()) throw ConfigError("mutations", "no mutations listed");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
    if (cfg.mc_samples == 0) throw ConfigError("mc_samples", "must be positive");
    if (kind == ConfigKind::sweep) {
        if (cfg.mutation_rates.empty()) throw ConfigError("mutation_rates", "sweep needs at least one rate");
        for (double r : cfg.mutation_rates)
            if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("mutation_rates", "rates must lie in [0, 1]");
    }
    for (int p : cfg.problems) {
        for (auto op : cfg.operators) {
            try {
                cfg.cell_config(p, op, cfg.mutations.front(), cfg.seed).validate();
            } catch (const std::exception& e) {
                // engine and operator messages read "field: reason"
                const std::string what = e.what();
                const auto colon = what.find(": ");
                if (colon != std::string::npos && what.find(' ') > colon)
                    throw ConfigError(what.substr(0, colon), what.substr(colon + 2));
                throw ConfigError("problems", "problem " + std::to_string(p) + ": " + what);
            }
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, ConfigKind kind = ConfigKind::experiment)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    return parse_config(in, kind);
}

}  // namespace psox
