#pragma once

#include "wrisk/matrix.hpp"
#include "wrisk/random.hpp"
#include "wrisk/svr.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace wrisk {

/// Genes are log10(C), log10(sigma2), log10(epsilon).
struct Chromosome {
    std::array<double, 3> genes{};

    SvrHyperparams decode() const;
    static Chromosome encode(const SvrHyperparams& hp);

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

struct GeneBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Search domain in log10 units: C in [1e-3, 1e3], sigma2 in [1e-3, 2^4],
/// epsilon in [1e-2, 2^3].
std::array<GeneBounds, 3> default_gene_bounds();

/// The fixed-hyperparameter SVR baseline (C = 1, sigma2 = 1, epsilon = 0.1),
/// expressed as a chromosome so GA and baseline decode identical values.
Chromosome default_chromosome();
SvrHyperparams default_svr_hyperparams();

enum class FitnessMode { TrainingRmse, CrossValidatedRmse };

struct GaConfig {
    std::size_t population_size = 50;
    std::size_t generations = 100;
    std::array<GeneBounds, 3> bounds = default_gene_bounds();
    std::size_t tournament_size = 3;
    double crossover_probability = 0.8;
    double blend_alpha = 0.5;
    double mutation_probability = 0.1;
    double mutation_scale = 0.15; // log10 units
    std::size_t elite_count = 1;
    bool seed_default_member = true;
    FitnessMode fitness_mode = FitnessMode::TrainingRmse;
    std::size_t folds = 5;
    std::size_t threads = 1;
    std::uint64_t seed = 1;
    SvrSolverOptions solver;
};

/// Throws ConfigError.
void validate(const GaConfig& config);

struct GenerationLog {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    Chromosome best;
};

struct GaResult {
    Chromosome best;
    SvrHyperparams best_hyperparams;
    double best_fitness = 0.0;
    std::vector<double> history; // best-so-far fitness per generation
    std::vector<GenerationLog> log;
    std::size_t evaluations = 0; // population_size * generations; repeats are served from a cache
};

/// Fitness of a decoded chromosome; smaller is better. Non-finite values rank last.
using FitnessFunction = std::function<double(const SvrHyperparams&)>;

std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng);

/// RMSE of an SVR fitted with the decoded hyperparameters, on the training
/// set or under contiguous k-fold cross-validation. Solver failures yield
/// +infinity.
double evaluate_fitness(const Chromosome& chromosome, const Matrix& X, std::span<const double> y,
                        const GaConfig& config);

/// Elites are copied verbatim; the rest come from tournament selection,
/// blend crossover and Gaussian mutation, clipped to the bounds.
std::vector<Chromosome> evolve_generation(const std::vector<Chromosome>& population,
                                          std::span<const double> fitnesses, const GaConfig& config,
                                          Rng& rng);

/// Runs exactly `generations` evaluate/evolve rounds against an arbitrary
/// fitness function. Evaluations within a generation may run on
/// `config.threads` workers; the outcome does not depend on it.
GaResult ga_optimize(const FitnessFunction& fitness, const GaConfig& config);

GaResult ga_run(const Matrix& X, std::span<const double> y, const GaConfig& config);

/// `generation,best_fitness,mean_fitness,C,sigma2,epsilon`, one row per generation.
void write_ga_log_csv(std::ostream& out, const GaResult& result);

} // namespace wrisk
