#pragma once

#include <psox/core.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psox {

/// Thrown for problem ids or names that are not registered.
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

enum class Modality { unimodal, multimodal };

/// Boundary penalty for the generalized penalized functions: k(|x| - a)^m outside [-a, a].
inline double penalty_u(double x, double a, double k, double m)
{
    if (x > a) return k * std::pow(x - a, m);
    if (x < -a) return k * std::pow(-x - a, m);
    return 0.0;
}

namespace detail {

constexpr double pi = std::numbers::pi;

inline double sq(double v) { return v * v; }

inline void require_chain(std::span<const double> x, const char* name)
{
    if (x.size() < 2) throw StructuralError(std::string(name) + " needs dimension >= 2");
}

inline double ackley(std::span<const double> x)
{
    const double n = static_cast<double>(x.size());
    double s2 = 0.0, sc = 0.0;
    for (double g : x) {
        s2 += g * g;
        sc += std::cos(2.0 * pi * g);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(s2 / n)) - std::exp(sc / n) + 20.0 + std::numbers::e;
}

inline double exponential(std::span<const double> x)
{
    double s = 0.0;
    for (double g : x) s += g * g;
    return -std::exp(-0.5 * s);
}

inline double griewank(std::span<const double> x)
{
    double s = 0.0, p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x[i] * x[i];
        p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + s / 4000.0 - p;
}

// Shared core of Levy-Montalvo 1 and penalized function 1.
inline double levy_montalvo_1_core(std::span<const double> x)
{
    require_chain(x, "Levy-Montalvo 1");
    const std::size_t n = x.size();
    auto y = [&](std::size_t i) { return 1.0 + 0.25 * (x[i] + 1.0); };
    double s = 10.0 * sq(std::sin(pi * y(0)));
    for (std::size_t i = 0; i + 1 < n; ++i) s += sq(y(i) - 1.0) * (1.0 + 10.0 * sq(std::sin(pi * y(i + 1))));
    s += sq(y(n - 1) - 1.0);
    return pi / static_cast<double>(n) * s;
}

// Shared core of Levy-Montalvo 2 and penalized function 2.
inline double levy_montalvo_2_core(std::span<const double> x)
{
    require_chain(x, "Levy-Montalvo 2");
    const std::size_t n = x.size();
    double s = 0.1 * sq(std::sin(3.0 * pi * x[0]));
    for (std::size_t i = 0; i + 1 < n; ++i) s += sq(x[i] - 1.0) * (1.0 + sq(std::sin(3.0 * pi * x[i + 1])));
    s += sq(x[n - 1] - 1.0) * (1.0 + sq(std::sin(2.0 * pi * x[n - 1])));
    return s;
}

inline double rastrigin(std::span<const double> x)
{
    double s = 10.0 * static_cast<double>(x.size());
    for (double g : x) s += g * g - 10.0 * std::cos(2.0 * pi * g);
    return s;
}

inline double rosenbrock(std::span<const double> x)
{
    require_chain(x, "Rosenbrock");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 100.0 * sq(x[i + 1] - x[i] * x[i]) + sq(x[i] - 1.0);
    return s;
}

inline double zakharov(std::span<const double> x)
{
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s1 += x[i] * x[i];
        s2 += 0.5 * static_cast<double>(i + 1) * x[i];
    }
    const double s2sq = s2 * s2;
    return s1 + s2sq + s2sq * s2sq;
}

inline double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double g : x) s += g * g;
    return s;
}

inline double hyper_ellipsoid(std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i + 1) * x[i] * x[i];
    return s;
}

inline double schwefel_4(std::span<const double> x)
{
    double m = 0.0;
    for (double g : x) m = std::max(m, std::abs(g));
    return m;
}

inline double de_jong_noise(std::span<const double> x, RngStream* rng)
{
    if (rng == nullptr) throw std::invalid_argument("problem 12 is noisy; pass an RngStream");
    double s = 0.0;
    for (double g : x) {
        const double g2 = g * g;
        s += g2 * g2 + rng->uniform();
    }
    return s;
}

inline double cigar(std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
    return x.empty() ? 0.0 : x[0] * x[0] + 1.0e7 * s;
}

inline double penalty_sum(std::span<const double> x)
{
    double s = 0.0;
    for (double g : x) s += penalty_u(g, 10.0, 100.0, 4.0);
    return s;
}

struct Entry {
    int id;
    const char* name;
    double lower;
    double upper;
    double optimum_gene;  // optimum is this value repeated on every gene
    Modality modality;
};

// Optima for 4, 5, 7, 14 and 15 are the true minimizers, not the origin.
inline constexpr std::array<Entry, 15> registry{{
    {1, "Ackley's Problem", -30.0, 30.0, 0.0, Modality::multimodal},
    {2, "Exponential Problem", -1.0, 1.0, 0.0, Modality::unimodal},
    {3, "Griewank Problem", -600.0, 600.0, 0.0, Modality::multimodal},
    {4, "Levy and Montalvo Problem 1", -10.0, 10.0, -1.0, Modality::multimodal},
    {5, "Levy and Montalvo Problem 2", -5.0, 5.0, 1.0, Modality::multimodal},
    {6, "Rastrigin Problem", -5.12, 5.12, 0.0, Modality::multimodal},
    {7, "Rosenbrock Problem", -30.0, 30.0, 1.0, Modality::unimodal},
    {8, "Zakharov's Function", -5.12, 5.12, 0.0, Modality::unimodal},
    {9, "Sphere Function", -5.12, 5.12, 0.0, Modality::unimodal},
    {10, "Axis Parallel Hyper Ellipsoid", -5.12, 5.12, 0.0, Modality::unimodal},
    {11, "Schwefel Problem 4", -100.0, 100.0, 0.0, Modality::unimodal},
    {12, "De Jong's Function with Noise", -10.0, 10.0, 0.0, Modality::unimodal},
    {13, "Cigar Function", -10.0, 10.0, 0.0, Modality::unimodal},
    {14, "Generalized Penalized Function 1", -10.0, 10.0, -1.0, Modality::multimodal},
    {15, "Generalized Penalized Function 2", -5.12, 5.12, 1.0, Modality::multimodal},
}};

inline const Entry& entry(int id)
{
    if (id < 1 || id > static_cast<int>(registry.size()))
        throw LookupError("unknown benchmark problem id " + std::to_string(id));
    return registry[static_cast<std::size_t>(id - 1)];
}

inline bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char l, char r) {
               return std::tolower(static_cast<unsigned char>(l)) == std::tolower(static_cast<unsigned char>(r));
           });
}

}  // namespace detail

inline constexpr int benchmark_count = 15;

/// Registered description of one benchmark at a chosen dimension.
struct ObjectiveSpec {
    int problem_id = 0;
    std::string name;
    std::size_t dimension = 0;
    Bounds bounds;
    std::optional<RealVector> optimum_location;  // empty means unverified
    double optimum_value = 0.0;
    // The value is an expectation over evaluation noise rather than an exact minimum.
    bool noisy = false;
    Modality modality = Modality::unimodal;
};

inline bool benchmark_is_noisy(int problem_id) { return problem_id == 12; }

/// Problems whose formula couples gene i with gene i+1.
inline bool benchmark_is_chained(int problem_id)
{
    return problem_id == 4 || problem_id == 5 || problem_id == 7 || problem_id == 14 || problem_id == 15;
}

/// Bounds, optimum, and metadata for problem `problem_id` at `dimension` genes.
inline ObjectiveSpec benchmark_spec(int problem_id, std::size_t dimension = 30)
{
    const auto& e = detail::entry(problem_id);
    if (dimension == 0) throw StructuralError("benchmark dimension must be positive");
    if (dimension < 2 && benchmark_is_chained(problem_id))
        throw StructuralError(std::string(e.name) + " needs dimension >= 2");
    ObjectiveSpec spec;
    spec.problem_id = e.id;
    spec.name = e.name;
    spec.dimension = dimension;
    spec.bounds = Bounds::uniform(dimension, e.lower, e.upper);
    spec.optimum_location = RealVector(dimension, e.optimum_gene);
    spec.modality = e.modality;
    if (problem_id == 2) spec.optimum_value = -1.0;
    if (benchmark_is_noisy(problem_id)) {
        spec.noisy = true;
        spec.optimum_value = 0.5 * static_cast<double>(dimension);
    }
    return spec;
}

/// Case-insensitive lookup by registered name; also accepts the decimal id.
inline int benchmark_id(std::string_view name_or_id)
{
    for (const auto& e : detail::registry)
        if (detail::iequals(name_or_id, e.name) || name_or_id == std::to_string(e.id)) return e.id;
    throw LookupError("unknown benchmark '" + std::string(name_or_id) + "'");
}

namespace detail {

inline double evaluate(int problem_id, std::span<const double> x, RngStream* noise)
{
    switch (entry(problem_id).id) {
    case 1: return ackley(x);
    case 2: return exponential(x);
    case 3: return griewank(x);
    case 4: return levy_montalvo_1_core(x);
    case 5: return levy_montalvo_2_core(x);
    case 6: return rastrigin(x);
    case 7: return rosenbrock(x);
    case 8: return zakharov(x);
    case 9: return sphere(x);
    case 10: return hyper_ellipsoid(x);
    case 11: return schwefel_4(x);
    case 12: return de_jong_noise(x, noise);
    case 13: return cigar(x);
    case 14: return levy_montalvo_1_core(x) + penalty_sum(x);
    case 15: return levy_montalvo_2_core(x) + penalty_sum(x);
    }
    throw LookupError("unknown benchmark problem id " + std::to_string(problem_id));
}

}  // namespace detail

/// Objective value of problem `problem_id` at x. Only problem 12 draws from `noise`.
inline double benchmark_eval(int problem_id, std::span<const double> x, RngStream& noise)
{
    return detail::evaluate(problem_id, x, &noise);
}

/// Deterministic overload; rejects the noisy problem.
inline double benchmark_eval(int problem_id, std::span<const double> x)
{
    return detail::evaluate(problem_id, x, nullptr);
}

inline std::string_view benchmark_name(int problem_id) { return detail::entry(problem_id).name; }

}  // namespace psox
