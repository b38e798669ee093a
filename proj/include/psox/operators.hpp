#pragma once

#include <psox/core.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace psox {

enum class CrossoverKind { ax, fx, blx_alpha, sbx, laplace, psox };
enum class MutationKind { num, gm };

/// How PSOX draws its two attraction coefficients.
enum class PsoxDraw { per_gene, per_individual };

/// What the mutation rate is a probability of: touching one gene, or mutating the whole child.
enum class MutationScope { per_gene, per_individual };

inline constexpr std::string_view to_string(CrossoverKind k)
{
    switch (k) {
    case CrossoverKind::ax: return "AX";
    case CrossoverKind::fx: return "FX";
    case CrossoverKind::blx_alpha: return "BLX";
    case CrossoverKind::sbx: return "SBX";
    case CrossoverKind::laplace: return "LX";
    case CrossoverKind::psox: return "PSOX";
    }
    return "?";
}

inline constexpr std::string_view to_string(MutationKind k) { return k == MutationKind::num ? "NUM" : "GM"; }

namespace detail {

inline std::string upper(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace detail

/// Case-insensitive; accepts the short labels plus a few long spellings.
inline std::optional<CrossoverKind> parse_crossover_kind(std::string_view name)
{
    const auto s = detail::upper(name);
    if (s == "AX") return CrossoverKind::ax;
    if (s == "FX") return CrossoverKind::fx;
    if (s == "BLX" || s == "BLX-ALPHA" || s == "BLX_ALPHA") return CrossoverKind::blx_alpha;
    if (s == "SBX") return CrossoverKind::sbx;
    if (s == "LX" || s == "LAPLACE") return CrossoverKind::laplace;
    if (s == "PSOX") return CrossoverKind::psox;
    return std::nullopt;
}

inline std::optional<MutationKind> parse_mutation_kind(std::string_view name)
{
    const auto s = detail::upper(name);
    if (s == "NUM") return MutationKind::num;
    if (s == "GM") return MutationKind::gm;
    return std::nullopt;
}

struct CrossoverConfig {
    CrossoverKind kind = CrossoverKind::psox;
    double ax_alpha = 0.5;
    double blx_alpha = 0.5;
    double sbx_eta = 2.0;
    double laplace_a = 0.0;
    double laplace_b = 0.5;
    double psox_w = 0.6;
    double psox_c1 = 1.5;
    double psox_c2 = 1.5;
    PsoxDraw psox_draw = PsoxDraw::per_gene;
    double crossover_rate = 0.8;

    void validate() const
    {
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
            throw std::invalid_argument("crossover.rate: must lie in [0, 1]");
        if (!(sbx_eta > 0.0)) throw std::invalid_argument("crossover.sbx_eta: must be > 0");
        if (!(blx_alpha > 0.0 && blx_alpha < 1.0)) throw std::invalid_argument("crossover.blx_alpha: must lie in (0, 1)");
        if (!(laplace_b >= 0.0)) throw std::invalid_argument("crossover.laplace_b: must be >= 0");
    }
};

struct MutationConfig {
    MutationKind kind = MutationKind::gm;
    double rate = 0.1;
    double gm_sigma_fraction = 0.01;
    double num_b = 5.0;
    MutationScope scope = MutationScope::per_individual;

    void validate() const
    {
        if (!(rate >= 0.0 && rate <= 1.0))
            throw std::invalid_argument("mutation.rate: must lie in [0, 1]");
        if (!(gm_sigma_fraction > 0.0)) throw std::invalid_argument("mutation.gm_sigma_fraction: must be > 0");
        if (!(num_b > 0.0)) throw std::invalid_argument("mutation.num_b: must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Crossover

/// O = alpha p1 + (1 - alpha) p2, gene by gene.
inline RealVector ax_crossover(std::span<const double> p1, std::span<const double> p2, double alpha)
{
    require_same_dimension(p1.size(), p2.size(), "ax_crossover");
    RealVector child(p1.size());
    for (std::size_t k = 0; k < child.size(); ++k) child[k] = alpha * p1[k] + (1.0 - alpha) * p2[k];
    return child;
}

/// Each gene uniform on the closed parental interval.
inline RealVector fx_crossover(std::span<const double> p1, std::span<const double> p2, RngStream& rng)
{
    require_same_dimension(p1.size(), p2.size(), "fx_crossover");
    RealVector child(p1.size());
    for (std::size_t k = 0; k < child.size(); ++k) {
        const double lo = std::min(p1[k], p2[k]);
        const double hi = std::max(p1[k], p2[k]);
        child[k] = lo == hi ? lo : rng.uniform(lo, hi);
    }
    return child;
}

/// Each gene uniform on the parental interval widened by alpha times its length on both sides.
inline RealVector blx_alpha_crossover(std::span<const double> p1, std::span<const double> p2, double alpha,
                                      RngStream& rng)
{
    require_same_dimension(p1.size(), p2.size(), "blx_alpha_crossover");
    RealVector child(p1.size());
    for (std::size_t k = 0; k < child.size(); ++k) {
        const double lo = std::min(p1[k], p2[k]);
        const double hi = std::max(p1[k], p2[k]);
        const double ext = alpha * (hi - lo);
        child[k] = lo == hi ? lo : rng.uniform(lo - ext, hi + ext);
    }
    return child;
}

/// SBX spread factor for a uniform draw u in [0, 1).
inline double sbx_beta(double u, double eta)
{
    const double e = 1.0 / (eta + 1.0);
    return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

/// Laplace crossover scale for a draw u in (0, 1).
inline double laplace_beta(double u, double a, double b)
{
    return u <= 0.5 ? a - b * std::log(u) : a + b * std::log(u);
}

using OffspringPair = std::pair<RealVector, RealVector>;

/// Simulated binary crossover; u is drawn per gene and both symmetric children are returned.
inline OffspringPair sbx_crossover(std::span<const double> p1, std::span<const double> p2, double eta, RngStream& rng)
{
    require_same_dimension(p1.size(), p2.size(), "sbx_crossover");
    if (!(eta > 0.0)) throw std::invalid_argument("sbx_crossover: eta must be > 0");
    OffspringPair out{RealVector(p1.size()), RealVector(p1.size())};
    for (std::size_t k = 0; k < p1.size(); ++k) {
        // uniform() never returns 1, so 1/(2(1-u)) stays finite
        const double beta = sbx_beta(rng.uniform(), eta);
        out.first[k] = 0.5 * ((1.0 + beta) * p1[k] + (1.0 - beta) * p2[k]);
        out.second[k] = 0.5 * ((1.0 - beta) * p1[k] + (1.0 + beta) * p2[k]);
    }
    return out;
}

inline OffspringPair laplace_crossover(std::span<const double> p1, std::span<const double> p2, double a, double b,
                                       RngStream& rng)
{
    require_same_dimension(p1.size(), p2.size(), "laplace_crossover");
    if (!(b >= 0.0)) throw std::invalid_argument("laplace_crossover: b must be >= 0");
    OffspringPair out{RealVector(p1.size()), RealVector(p1.size())};
    for (std::size_t k = 0; k < p1.size(); ++k) {
        const double beta = laplace_beta(rng.uniform_open(), a, b);
        const double d = std::abs(p1[k] - p2[k]);
        out.first[k] = p1[k] + beta * d;
        out.second[k] = p2[k] + beta * d;
    }
    return out;
}

/// One PSOX gene for given attraction draws r1, r2.
inline double psox_gene(double p_i, double pbest_j, double gbest, const CrossoverConfig& cfg, double r1, double r2)
{
    return cfg.psox_w * p_i + cfg.psox_c1 * r1 * (pbest_j - p_i) + cfg.psox_c2 * r2 * (gbest - p_i);
}

/// Particle-swarm style crossover:
///   O = w p_i + c1 r1 (pbest_j - p_i) + c2 r2 (gbest - p_i)
/// where pbest_j is the historical best of a different slot and gbest the best found so far.
/// r1, r2 are uniform on [0, 1), drawn per gene or once per child depending on cfg.psox_draw.
inline RealVector psox_crossover(std::span<const double> p_i, std::span<const double> pbest_j,
                                 std::span<const double> gbest, const CrossoverConfig& cfg, RngStream& rng)
{
    require_same_dimension(p_i.size(), pbest_j.size(), "psox_crossover");
    require_same_dimension(p_i.size(), gbest.size(), "psox_crossover");
    const bool per_gene = cfg.psox_draw == PsoxDraw::per_gene;
    double r1 = 0.0, r2 = 0.0;
    if (!per_gene) {
        r1 = rng.uniform();
        r2 = rng.uniform();
    }
    RealVector child(p_i.size());
    for (std::size_t k = 0; k < child.size(); ++k) {
        if (per_gene) {
            r1 = rng.uniform();
            r2 = rng.uniform();
        }
        child[k] = psox_gene(p_i[k], pbest_j[k], gbest[k], cfg, r1, r2);
    }
    return child;
}

// ---------------------------------------------------------------------------
// Mutation

/// Adds N(0, (sigma_fraction * range)^2) to genes, then clamps. With per-gene scope each gene is hit
/// with probability rate; with per-individual scope the whole vector is hit with that probability.
inline RealVector gaussian_mutation(RealVector x, const Bounds& b, const MutationConfig& cfg, RngStream& rng)
{
    require_same_dimension(x.size(), b.dimension(), "gaussian_mutation");
    const bool whole = cfg.scope == MutationScope::per_individual;
    if (whole && !(rng.uniform() < cfg.rate)) return clamp_to_bounds(std::move(x), b);
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (whole || rng.uniform() < cfg.rate) x[k] += cfg.gm_sigma_fraction * b.width(k) * rng.normal();
    }
    return clamp_to_bounds(std::move(x), b);
}

/// Non-uniform mutation: the step toward a random bound shrinks as gen approaches max_gen.
inline RealVector nonuniform_mutation(RealVector x, const Bounds& b, std::size_t gen, std::size_t max_gen,
                                      const MutationConfig& cfg, RngStream& rng)
{
    require_same_dimension(x.size(), b.dimension(), "nonuniform_mutation");
    if (gen > max_gen) throw std::invalid_argument("nonuniform_mutation: gen exceeds max_gen");
    const double progress = max_gen == 0 ? 1.0 : static_cast<double>(gen) / static_cast<double>(max_gen);
    const double exponent = std::pow(1.0 - progress, cfg.num_b);
    const bool whole = cfg.scope == MutationScope::per_individual;
    if (whole && !(rng.uniform() < cfg.rate)) return clamp_to_bounds(std::move(x), b);
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!whole && !(rng.uniform() < cfg.rate)) continue;
        const bool up = rng.uniform() < 0.5;
        const double factor = 1.0 - std::pow(rng.uniform(), exponent);
        if (up)
            x[k] += (b.upper[k] - x[k]) * factor;
        else
            x[k] -= (x[k] - b.lower[k]) * factor;
    }
    return clamp_to_bounds(std::move(x), b);
}

// ---------------------------------------------------------------------------
// Selection

/// Index of the fittest of k uniform draws with replacement; ties keep the earliest draw.
inline std::size_t tournament_index(std::span<const Individual> pop, std::size_t k, RngStream& rng)
{
    if (pop.empty()) throw StructuralError("tournament_select: empty population");
    if (k == 0) throw std::invalid_argument("tournament_select: k must be >= 1");
    std::size_t best = rng.index(pop.size());
    for (std::size_t draw = 1; draw < k; ++draw) {
        const std::size_t c = rng.index(pop.size());
        if (pop[c].fitness < pop[best].fitness) best = c;
    }
    return best;
}

inline const Individual& tournament_select(std::span<const Individual> pop, std::size_t k, RngStream& rng)
{
    return pop[tournament_index(pop, k, rng)];
}

}  // namespace psox
