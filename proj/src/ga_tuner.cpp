#include "wrisk/ga_tuner.hpp"

#include "wrisk/error.hpp"
#include "wrisk/metrics.hpp"
#include "wrisk/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

namespace wrisk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-finite fitness ranks after every finite value.
double rank_value(double fitness) { return std::isfinite(fitness) ? fitness : kInf; }

bool better(double a, std::size_t ia, double b, std::size_t ib) {
    const double ra = rank_value(a);
    const double rb = rank_value(b);
    return ra < rb || (ra == rb && ia < ib);
}

std::vector<std::size_t> ranking(std::span<const double> fitnesses) {
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return better(fitnesses[a], a, fitnesses[b], b);
    });
    return order;
}

Chromosome clip(Chromosome c, const std::array<GeneBounds, 3>& bounds) {
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        c.genes[g] = std::clamp(c.genes[g], bounds[g].lo, bounds[g].hi);
    }
    return c;
}

std::size_t tournament(std::span<const double> fitnesses, std::size_t size, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, fitnesses.size() - 1);
    std::size_t best = pick(rng);
    for (std::size_t k = 1; k < size; ++k) {
        const std::size_t cand = pick(rng);
        if (better(fitnesses[cand], cand, fitnesses[best], best)) {
            best = cand;
        }
    }
    return best;
}

std::vector<double> evaluate_all(const std::vector<Chromosome>& population, const FitnessFunction& fitness,
                                 std::size_t threads) {
    std::vector<double> out(population.size());
    if (population.empty()) {
        return out;
    }
    const auto run = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t k = begin; k < population.size(); k += stride) {
            out[k] = fitness(population[k].decode());
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, population.size());
    if (workers == 1) {
        run(0, 1);
        return out;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(run, w, workers);
    }
    pool.clear(); // joins
    return out;
}

double svr_fitness(const SvrHyperparams& hp, const Matrix& X, std::span<const double> y,
                   const GaConfig& config) {
    try {
        if (config.fitness_mode == FitnessMode::TrainingRmse) {
            const SvrModel model = svr_fit(X, y, hp, config.solver);
            return rmse(svr_predict(model, X), y);
        }
        // Contiguous folds, so neighbouring weeks stay together.
        const std::size_t n = X.rows();
        const std::size_t k = std::min(config.folds, n);
        std::vector<double> predicted(n);
        for (std::size_t f = 0; f < k; ++f) {
            const std::size_t lo = f * n / k;
            const std::size_t hi = (f + 1) * n / k;
            Matrix train(0, X.cols());
            std::vector<double> train_y;
            for (std::size_t i = 0; i < n; ++i) {
                if (i < lo || i >= hi) {
                    train.append_row(X.row(i));
                    train_y.push_back(y[i]);
                }
            }
            const SvrModel model = svr_fit(train, train_y, hp, config.solver);
            for (std::size_t i = lo; i < hi; ++i) {
                predicted[i] = svr_predict(model, X.row(i));
            }
        }
        return rmse(predicted, y);
    } catch (const FitError&) {
        return kInf;
    }
}

} // namespace

SvrHyperparams Chromosome::decode() const {
    SvrHyperparams hp;
    hp.C = std::pow(10.0, genes[0]);
    hp.kernel = KernelSpec::rbf(std::pow(10.0, genes[1]));
    hp.epsilon = std::pow(10.0, genes[2]);
    return hp;
}

Chromosome Chromosome::encode(const SvrHyperparams& hp) {
    return Chromosome{{std::log10(hp.C), std::log10(hp.kernel.sigma2), std::log10(hp.epsilon)}};
}

std::array<GeneBounds, 3> default_gene_bounds() {
    return {GeneBounds{-3.0, 3.0}, GeneBounds{-3.0, std::log10(16.0)}, GeneBounds{-2.0, std::log10(8.0)}};
}

Chromosome default_chromosome() { return Chromosome{{0.0, 0.0, -1.0}}; }

SvrHyperparams default_svr_hyperparams() { return default_chromosome().decode(); }

void validate(const GaConfig& c) {
    if (c.population_size < 2) {
        throw ConfigError("ga: population_size must be at least 2");
    }
    if (c.generations < 1) {
        throw ConfigError("ga: generations must be at least 1");
    }
    if (c.elite_count < 1 || c.elite_count > c.population_size) {
        throw ConfigError("ga: elite_count must lie in [1, population_size]");
    }
    if (c.tournament_size < 1) {
        throw ConfigError("ga: tournament_size must be at least 1");
    }
    for (const auto& b : c.bounds) {
        if (!(b.lo < b.hi)) {
            throw ConfigError("ga: gene bounds need lo < hi");
        }
    }
    const auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!probability(c.crossover_probability) || !probability(c.mutation_probability)) {
        throw ConfigError("ga: probabilities must lie in [0, 1]");
    }
    if (c.mutation_scale < 0.0 || c.blend_alpha < 0.0) {
        throw ConfigError("ga: mutation_scale and blend_alpha must be non-negative");
    }
    if (c.fitness_mode == FitnessMode::CrossValidatedRmse && c.folds < 2) {
        throw ConfigError("ga: cross-validation needs at least 2 folds");
    }
}

std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng) {
    validate(config);
    std::vector<Chromosome> population(config.population_size);
    for (auto& c : population) {
        for (std::size_t g = 0; g < c.genes.size(); ++g) {
            std::uniform_real_distribution<double> gene(config.bounds[g].lo, config.bounds[g].hi);
            c.genes[g] = gene(rng);
        }
    }
    if (config.seed_default_member) {
        population[0] = clip(default_chromosome(), config.bounds);
    }
    return population;
}

double evaluate_fitness(const Chromosome& chromosome, const Matrix& X, std::span<const double> y,
                        const GaConfig& config) {
    return svr_fitness(chromosome.decode(), X, y, config);
}

std::vector<Chromosome> evolve_generation(const std::vector<Chromosome>& population,
                                          std::span<const double> fitnesses, const GaConfig& config,
                                          Rng& rng) {
    if (fitnesses.size() != population.size()) {
        throw std::invalid_argument("evolve_generation: fitness count does not match population");
    }
    const auto order = ranking(fitnesses);
    std::vector<Chromosome> next;
    next.reserve(population.size());
    // Elites keep their population order.
    std::vector<std::size_t> elites(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(
                                                        std::min(config.elite_count, population.size())));
    std::sort(elites.begin(), elites.end());
    for (std::size_t e : elites) {
        next.push_back(population[e]);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, config.mutation_scale);
    while (next.size() < population.size()) {
        const Chromosome& a = population[tournament(fitnesses, config.tournament_size, rng)];
        const Chromosome& b = population[tournament(fitnesses, config.tournament_size, rng)];
        Chromosome child = a;
        if (unit(rng) < config.crossover_probability) {
            // BLX-alpha: sample each gene from the parents' interval widened by alpha.
            for (std::size_t g = 0; g < child.genes.size(); ++g) {
                const double lo = std::min(a.genes[g], b.genes[g]);
                const double hi = std::max(a.genes[g], b.genes[g]);
                const double pad = config.blend_alpha * (hi - lo);
                child.genes[g] = lo - pad + unit(rng) * (hi - lo + 2.0 * pad);
            }
        }
        for (auto& gene : child.genes) {
            if (unit(rng) < config.mutation_probability) {
                gene += jitter(rng);
            }
        }
        next.push_back(clip(child, config.bounds));
    }
    return next;
}

GaResult ga_optimize(const FitnessFunction& fitness, const GaConfig& config) {
    validate(config);
    Rng rng{config.seed};
    GaResult result;
    result.best_fitness = kInf;
    bool have_best = false;

    // Elites and unchanged copies recur; the fitness is assumed deterministic.
    std::map<std::array<double, 3>, double> cache;
    auto population = init_population(config, rng);
    for (std::size_t gen = 1;; ++gen) {
        std::vector<Chromosome> fresh;
        for (const auto& c : population) {
            if (!cache.contains(c.genes) &&
                std::find(fresh.begin(), fresh.end(), c) == fresh.end()) {
                fresh.push_back(c);
            }
        }
        const auto computed = evaluate_all(fresh, fitness, config.threads);
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            cache.emplace(fresh[k].genes, computed[k]);
        }
        std::vector<double> fitnesses;
        for (const auto& c : population) {
            fitnesses.push_back(cache.at(c.genes));
        }
        result.evaluations += population.size();

        const auto order = ranking(fitnesses);
        const std::size_t top = order.front();
        if (!have_best || rank_value(fitnesses[top]) < result.best_fitness) {
            result.best = population[top];
            result.best_fitness = rank_value(fitnesses[top]);
            have_best = true;
        }
        result.history.push_back(result.best_fitness);

        double sum = 0.0;
        std::size_t finite = 0;
        for (double f : fitnesses) {
            if (std::isfinite(f)) {
                sum += f;
                ++finite;
            }
        }
        result.log.push_back({gen, result.best_fitness,
                              finite > 0 ? sum / static_cast<double>(finite) : kInf, result.best});

        if (gen == config.generations) {
            break;
        }
        population = evolve_generation(population, fitnesses, config, rng);
    }
    result.best_hyperparams = result.best.decode();
    return result;
}

GaResult ga_run(const Matrix& X, std::span<const double> y, const GaConfig& config) {
    if (X.rows() < 2 || X.rows() != y.size()) {
        throw DataError("ga_run: need at least 2 aligned training rows");
    }
    return ga_optimize([&](const SvrHyperparams& hp) { return svr_fitness(hp, X, y, config); }, config);
}

void write_ga_log_csv(std::ostream& out, const GaResult& result) {
    out << "generation,best_fitness,mean_fitness,C,sigma2,epsilon\n";
    for (const auto& row : result.log) {
        const auto hp = row.best.decode();
        out << row.generation << ',' << format_double(row.best_fitness) << ',' << format_double(row.mean_fitness)
            << ',' << format_double(hp.C) << ',' << format_double(hp.kernel.sigma2) << ','
            << format_double(hp.epsilon) << '\n';
    }
}

} // namespace wrisk
