// Minimal use of the engine: PSOX + Gaussian mutation on a 10-dimensional Rastrigin.
#include <psox/engine.hpp>

#include <cstdio>

int main()
{
    psox::GaConfig cfg;
    cfg.objective = psox::benchmark_spec(6, 10);
    cfg.population_size = 60;
    cfg.generations = 200;
    cfg.crossover.kind = psox::CrossoverKind::psox;
    cfg.mutation.kind = psox::MutationKind::gm;
    cfg.seed = 7;

    const auto trace = psox::run_ga(cfg);
    for (std::size_t g = 0; g < trace.best_per_generation.size(); g += 20)
        std::printf("gen %4zu  best %.6e\n", g + 1, trace.best_per_generation[g]);
    std::printf("final %.6e after %zu evaluations\n", trace.final_best.fitness, trace.evaluations);
}
