#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace psox {

/// Chromosome representation: one real gene per problem dimension.
using RealVector = std::vector<double>;

/// Thrown when vector dimensions disagree or a container has the wrong shape.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-gene box constraints. Every gene must satisfy lower < upper.
struct Bounds {
    RealVector lower;
    RealVector upper;

    Bounds() = default;
    Bounds(RealVector lo, RealVector hi) : lower(std::move(lo)), upper(std::move(hi)) { validate(); }

    /// Same [lo, hi] range on every one of `dimension` genes.
    static Bounds uniform(std::size_t dimension, double lo, double hi)
    {
        return Bounds(RealVector(dimension, lo), RealVector(dimension, hi));
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return lower.size(); }
    [[nodiscard]] double width(std::size_t k) const { return upper[k] - lower[k]; }

    [[nodiscard]] bool contains(std::span<const double> x) const
    {
        if (x.size() != dimension()) return false;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (!(x[k] >= lower[k] && x[k] <= upper[k])) return false;
        return true;
    }

    void validate() const
    {
        if (lower.size() != upper.size())
            throw StructuralError("bounds: lower and upper differ in length");
        for (std::size_t k = 0; k < lower.size(); ++k)
            if (!(lower[k] < upper[k]))
                throw std::invalid_argument("bounds: lower must be < upper for gene " + std::to_string(k));
    }
};

struct Individual {
    RealVector position;
    double fitness = 0.0;  // meaningful only when evaluated
    bool evaluated = false;
};

/// Seedable, replayable random stream. Not thread-safe; each run owns one.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform on [0, 1) built from the top 53 bits so 1.0 is unreachable.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi)
    {
        const double v = lo + (hi - lo) * uniform();
        return v < hi ? v : std::nextafter(hi, lo);
    }

    /// Uniform on the open interval (0, 1).
    double uniform_open()
    {
        double u = uniform();
        while (u == 0.0) u = uniform();
        return u;
    }

    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n)
    {
        if (n == 0) throw std::invalid_argument("RngStream::index: empty range");
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    double normal() { return normal_(engine_); }

    double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Seed for the run_index-th independent run of an experiment.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run_index) noexcept
{
    return master + run_index;
}

inline void require_same_dimension(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw StructuralError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                              std::to_string(b) + ")");
}

/// Projects every gene onto [lower, upper].
inline RealVector clamp_to_bounds(RealVector x, const Bounds& b)
{
    require_same_dimension(x.size(), b.dimension(), "clamp_to_bounds");
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], b.lower[k], b.upper[k]);
    return x;
}

/// Each gene drawn independently from [lower, upper).
inline RealVector uniform_vector(const Bounds& b, RngStream& rng)
{
    RealVector x(b.dimension());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(b.lower[k], b.upper[k]);
    return x;
}

inline bool all_finite(std::span<const double> x)
{
    return std::all_of(x.begin(), x.end(), [](double g) { return std::isfinite(g); });
}

}  // namespace psox
