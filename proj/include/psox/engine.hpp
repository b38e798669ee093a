#pragma once

#include <psox/benchmarks.hpp>
#include <psox/core.hpp>
#include <psox/operators.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace psox {

struct GaConfig {
    ObjectiveSpec objective = benchmark_spec(9, 30);
    std::size_t population_size = 300;
    std::size_t generations = 1000;
    CrossoverConfig crossover;
    MutationConfig mutation;
    std::size_t selection_k = 3;
    std::uint64_t seed = 0;
    std::size_t elitism = 1;

    void validate() const
    {
        if (objective.dimension == 0 || objective.bounds.dimension() != objective.dimension)
            throw StructuralError("objective dimension does not match its bounds");
        objective.bounds.validate();
        if (population_size == 0) throw std::invalid_argument("population_size: must be positive");
        if (selection_k == 0) throw std::invalid_argument("tournament_size: must be >= 1");
        if (elitism > population_size) throw std::invalid_argument("elitism: exceeds population_size");
        if (crossover.kind == CrossoverKind::psox && population_size < 2)
            throw std::invalid_argument("population_size: PSOX needs >= 2 to pick a memory slot j != i");
        crossover.validate();
        mutation.validate();
    }
};

struct MemoryEntry {
    RealVector position;
    double fitness = 0.0;
};

/// Per-slot historical bests plus the global best; persists across generations.
struct SwarmMemory {
    std::vector<MemoryEntry> pbest;
    MemoryEntry gbest;
};

struct GaState {
    GaConfig config;
    std::vector<Individual> population;
    SwarmMemory memory;
    RngStream rng;
    std::size_t generation = 0;  // completed generations
    std::size_t evaluations = 0;
};

struct RunTrace {
    std::vector<double> best_per_generation;  // best-so-far after each generation
    MemoryEntry final_best;
    std::size_t evaluations = 0;
};

/// Which slots a PSOX child was built from.
struct PsoxPairing {
    std::size_t generation;
    std::size_t parent_slot;  // i
    std::size_t memory_slot;  // j
};

/// Instrumentation points for tests and progress reporting.
struct EngineHooks {
    std::function<void(const PsoxPairing&)> on_psox;
    std::function<void(const GaState&)> on_generation;
};

namespace detail {

inline void evaluate(GaState& state, Individual& ind)
{
    ind.fitness = benchmark_eval(state.config.objective.problem_id, ind.position, state.rng);
    ind.evaluated = true;
    ++state.evaluations;
}

inline void refresh_gbest(SwarmMemory& memory)
{
    auto best = std::min_element(memory.pbest.begin(), memory.pbest.end(),
                                 [](const MemoryEntry& a, const MemoryEntry& b) { return a.fitness < b.fitness; });
    if (best->fitness < memory.gbest.fitness) memory.gbest = *best;
}

inline bool produces_pair(CrossoverKind k) { return k == CrossoverKind::sbx || k == CrossoverKind::laplace; }

inline RealVector mutate(GaState& state, RealVector x)
{
    const auto& cfg = state.config;
    if (cfg.mutation.kind == MutationKind::gm)
        return gaussian_mutation(std::move(x), cfg.objective.bounds, cfg.mutation, state.rng);
    return nonuniform_mutation(std::move(x), cfg.objective.bounds, state.generation, cfg.generations, cfg.mutation,
                               state.rng);
}

}  // namespace detail

/// Uniform random population, evaluated, with pbest[i] = individual i and gbest = argmin.
inline GaState init_state(const GaConfig& cfg)
{
    cfg.validate();
    GaState state{cfg, {}, {}, RngStream(cfg.seed), 0, 0};
    state.population.resize(cfg.population_size);
    for (auto& ind : state.population) {
        ind.position = uniform_vector(cfg.objective.bounds, state.rng);
        detail::evaluate(state, ind);
    }
    state.memory.pbest.reserve(cfg.population_size);
    for (const auto& ind : state.population) state.memory.pbest.push_back({ind.position, ind.fitness});
    auto best = std::min_element(state.memory.pbest.begin(), state.memory.pbest.end(),
                                 [](const MemoryEntry& a, const MemoryEntry& b) { return a.fitness < b.fitness; });
    state.memory.gbest = *best;
    return state;
}

/// One generational step: selection, crossover, mutation, evaluation, elitism, memory update.
inline void step_generation(GaState& state, const EngineHooks& hooks = {})
{
    const auto& cfg = state.config;
    const std::size_t n = cfg.population_size;
    const auto& bounds = cfg.objective.bounds;
    const auto& xo = cfg.crossover;
    auto& rng = state.rng;
    const std::span<const Individual> pop(state.population);

    std::vector<Individual> offspring;
    offspring.reserve(n);
    auto emit = [&](RealVector x) {
        if (offspring.size() == n) return;
        Individual child;
        child.position = detail::mutate(state, clamp_to_bounds(std::move(x), bounds));
        detail::evaluate(state, child);
        offspring.push_back(std::move(child));
    };

    while (offspring.size() < n) {
        const bool cross = rng.uniform() < xo.crossover_rate;
        const std::size_t a = tournament_index(pop, cfg.selection_k, rng);
        const auto& pa = pop[a].position;

        if (xo.kind == CrossoverKind::psox) {
            if (!cross) {
                emit(pa);
                continue;
            }
            std::size_t j = rng.index(n - 1);
            if (j >= a) ++j;
            if (hooks.on_psox) hooks.on_psox({state.generation, a, j});
            emit(psox_crossover(pa, state.memory.pbest[j].position, state.memory.gbest.position, xo, rng));
            continue;
        }

        if (detail::produces_pair(xo.kind)) {
            const auto& pb = pop[tournament_index(pop, cfg.selection_k, rng)].position;
            if (!cross) {
                emit(pa);
                emit(pb);
                continue;
            }
            auto kids = xo.kind == CrossoverKind::sbx ? sbx_crossover(pa, pb, xo.sbx_eta, rng)
                                                      : laplace_crossover(pa, pb, xo.laplace_a, xo.laplace_b, rng);
            emit(std::move(kids.first));
            emit(std::move(kids.second));
            continue;
        }

        if (!cross) {
            emit(pa);
            continue;
        }
        const auto& pb = pop[tournament_index(pop, cfg.selection_k, rng)].position;
        switch (xo.kind) {
        case CrossoverKind::ax: emit(ax_crossover(pa, pb, xo.ax_alpha)); break;
        case CrossoverKind::fx: emit(fx_crossover(pa, pb, rng)); break;
        default: emit(blx_alpha_crossover(pa, pb, xo.blx_alpha, rng)); break;
        }
    }

    if (cfg.elitism > 0) {
        // The elitism-count best parents overwrite the worst offspring.
        std::vector<std::size_t> parents(n), kids(n);
        std::iota(parents.begin(), parents.end(), std::size_t{0});
        std::iota(kids.begin(), kids.end(), std::size_t{0});
        const auto e = static_cast<std::ptrdiff_t>(cfg.elitism);
        std::partial_sort(parents.begin(), parents.begin() + e, parents.end(), [&](std::size_t l, std::size_t r) {
            return pop[l].fitness < pop[r].fitness;
        });
        std::partial_sort(kids.begin(), kids.begin() + e, kids.end(), [&](std::size_t l, std::size_t r) {
            return offspring[l].fitness > offspring[r].fitness;
        });
        for (std::ptrdiff_t m = 0; m < e; ++m) offspring[kids[m]] = pop[parents[m]];
    }

    state.population = std::move(offspring);
    for (std::size_t s = 0; s < n; ++s) {
        const auto& ind = state.population[s];
        if (ind.fitness < state.memory.pbest[s].fitness) state.memory.pbest[s] = {ind.position, ind.fitness};
    }
    detail::refresh_gbest(state.memory);
    ++state.generation;
    if (hooks.on_generation) hooks.on_generation(state);
}

/// Runs cfg.generations steps and records the best-so-far objective after each.
inline RunTrace run_ga(const GaConfig& cfg, const EngineHooks& hooks = {})
{
    GaState state = init_state(cfg);
    RunTrace trace;
    trace.best_per_generation.reserve(cfg.generations);
    while (state.generation < cfg.generations) {
        step_generation(state, hooks);
        trace.best_per_generation.push_back(state.memory.gbest.fitness);
    }
    trace.final_best = state.memory.gbest;
    trace.evaluations = state.evaluations;
    return trace;
}

/// Memory invariant violations between two consecutive states; empty when all hold.
inline std::vector<std::string> audit_memory(const SwarmMemory& before, const GaState& after)
{
    std::vector<std::string> problems;
    const auto& mem = after.memory;
    if (mem.pbest.size() != after.population.size()) problems.push_back("pbest size differs from population size");
    for (std::size_t s = 0; s < mem.pbest.size() && s < after.population.size(); ++s) {
        if (mem.pbest[s].fitness > after.population[s].fitness)
            problems.push_back("slot " + std::to_string(s) + ": pbest worse than current occupant");
        if (s < before.pbest.size() && mem.pbest[s].fitness > before.pbest[s].fitness)
            problems.push_back("slot " + std::to_string(s) + ": pbest regressed");
    }
    double min_pbest = mem.pbest.empty() ? mem.gbest.fitness : mem.pbest.front().fitness;
    for (const auto& e : mem.pbest) min_pbest = std::min(min_pbest, e.fitness);
    if (mem.gbest.fitness != min_pbest) problems.push_back("gbest differs from min over pbest");
    if (mem.gbest.fitness > before.gbest.fitness) problems.push_back("gbest regressed");
    return problems;
}

}  // namespace psox
