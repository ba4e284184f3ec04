#include "wrisk/error.hpp"
#include "wrisk/ga_tuner.hpp"
#include "wrisk/metrics.hpp"
#include "wrisk/synthetic.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace wrisk;

namespace {

GaConfig small_config(std::uint64_t seed = 1) {
    GaConfig c;
    c.population_size = 10;
    c.generations = 5;
    c.seed = seed;
    return c;
}

bool within_bounds(const Chromosome& c, const std::array<GeneBounds, 3>& b) {
    for (std::size_t g = 0; g < 3; ++g) {
        if (c.genes[g] < b[g].lo || c.genes[g] > b[g].hi) {
            return false;
        }
    }
    return true;
}

double stub_fitness(const SvrHyperparams& hp) {
    return std::pow(hp.C - 10.0, 2) + std::pow(hp.kernel.sigma2 - 2.0, 2) + std::pow(hp.epsilon - 0.5, 2);
}

FeatureSet small_dataset(std::uint64_t seed, int weeks = 60) {
    SynthConfig s;
    s.weeks = weeks;
    s.seed = seed;
    return build_claims_features(generate_synthetic(s));
}

} // namespace

TEST_CASE("default chromosome decodes to the fixed SVR settings") {
    const auto hp = default_chromosome().decode();
    CHECK(hp.C == 1.0);
    CHECK(hp.kernel.sigma2 == 1.0);
    CHECK(hp.epsilon == 0.1);
    CHECK(default_svr_hyperparams() == hp);
}

TEST_CASE("default bounds are the log10 search domain") {
    const auto b = default_gene_bounds();
    CHECK(b[0].lo == -3.0);
    CHECK(b[0].hi == 3.0);
    CHECK(std::pow(10.0, b[1].lo) == doctest::Approx(1e-3));
    CHECK(std::pow(10.0, b[1].hi) == doctest::Approx(16.0));
    CHECK(std::pow(10.0, b[2].lo) == doctest::Approx(1e-2));
    CHECK(std::pow(10.0, b[2].hi) == doctest::Approx(8.0));
}

TEST_CASE("init_population") {
    GaConfig c;
    Rng a(7), b(7);
    const auto p1 = init_population(c, a);
    const auto p2 = init_population(c, b);
    CHECK(p1 == p2);
    CHECK(p1.size() == c.population_size);
    for (const auto& ch : p1) {
        CHECK(within_bounds(ch, c.bounds));
    }
    CHECK(p1[0] == default_chromosome());

    c.bounds[1] = {1.0, 1.0};
    Rng r(1);
    CHECK_THROWS_AS(init_population(c, r), ConfigError);
}

TEST_CASE("GaConfig validation") {
    GaConfig c;
    c.population_size = 1;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = GaConfig{};
    c.generations = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = GaConfig{};
    c.elite_count = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = GaConfig{};
    c.mutation_probability = 1.5;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("evaluate_fitness on flat data with a wide tube is zero") {
    Matrix X = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 1}, {2, 2, 2}});
    std::vector<double> y(4, 3.5);
    Chromosome wide{{0.0, 0.0, std::log10(8.0)}};
    CHECK(evaluate_fitness(wide, X, y, GaConfig{}) == 0.0);
}

TEST_CASE("evaluate_fitness is pure and equals the RMSE of the fitted SVR") {
    const auto data = small_dataset(3);
    const Chromosome c{{1.2, -0.5, -1.3}};
    const double f1 = evaluate_fitness(c, data.X, data.y, GaConfig{});
    const double f2 = evaluate_fitness(c, data.X, data.y, GaConfig{});
    CHECK(f1 == f2);
    const auto model = svr_fit(data.X, data.y, c.decode());
    CHECK(f1 == rmse(svr_predict(model, data.X), data.y));

    GaConfig cv;
    cv.fitness_mode = FitnessMode::CrossValidatedRmse;
    cv.folds = 4;
    const double held_out = evaluate_fitness(c, data.X, data.y, cv);
    CHECK(std::isfinite(held_out));
    CHECK(held_out > f1);
}

TEST_CASE("evaluate_fitness maps solver failure to +infinity") {
    const auto data = small_dataset(4);
    GaConfig c;
    c.solver.max_iterations = 1;
    c.solver.tolerance = 1e-12;
    CHECK(std::isinf(evaluate_fitness(Chromosome{{3.0, 0.0, -2.0}}, data.X, data.y, c)));
}

TEST_CASE("evolve_generation with pure elitism returns the same population") {
    GaConfig c = small_config();
    c.elite_count = c.population_size;
    Rng rng(3);
    const auto pop = init_population(c, rng);
    std::vector<double> fit;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        fit.push_back(static_cast<double>((i * 7) % 10));
    }
    CHECK(evolve_generation(pop, fit, c, rng) == pop);
}

TEST_CASE("evolve_generation without crossover or mutation copies parents") {
    GaConfig c = small_config();
    c.crossover_probability = 0.0;
    c.mutation_probability = 0.0;
    Rng rng(5);
    const auto pop = init_population(c, rng);
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        fit[i] = static_cast<double>(pop.size() - i);
    }
    const auto next = evolve_generation(pop, fit, c, rng);
    REQUIRE(next.size() == pop.size());
    CHECK(next[0] == pop.back()); // the single elite is the fittest member
    for (const auto& child : next) {
        CHECK(std::find(pop.begin(), pop.end(), child) != pop.end());
    }
}

TEST_CASE("offspring always stay within bounds") {
    GaConfig c;
    c.population_size = 100;
    c.mutation_probability = 1.0;
    c.mutation_scale = 3.0;
    c.blend_alpha = 2.0;
    Rng rng(9);
    auto pop = init_population(c, rng);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t genes = 0;
    while (genes < 10000) {
        std::vector<double> fit(pop.size());
        for (auto& f : fit) {
            f = u(rng);
        }
        pop = evolve_generation(pop, fit, c, rng);
        for (const auto& ch : pop) {
            CHECK(within_bounds(ch, c.bounds));
            genes += 3;
        }
    }
}

TEST_CASE("stub fitness: the GA recovers the grid-oracle optimum within 5%") {
    std::array<std::array<double, 2>, 3> log_bounds;
    const auto b = default_gene_bounds();
    for (std::size_t g = 0; g < 3; ++g) {
        log_bounds[g] = {b[g].lo, b[g].hi};
    }
    const auto grid = oracle::log_grid_minimum(
        [](double C, double s2, double e) { return stub_fitness({C, e, KernelSpec::rbf(s2)}); }, log_bounds, 241);
    CHECK(grid[0] == doctest::Approx(10.0).epsilon(0.05));
    CHECK(grid[1] == doctest::Approx(2.0).epsilon(0.05));
    CHECK(grid[2] == doctest::Approx(0.5).epsilon(0.05));

    GaConfig c;
    const auto result = ga_optimize(stub_fitness, c);
    CHECK(result.best_hyperparams.C == doctest::Approx(grid[0]).epsilon(0.05));
    CHECK(result.best_hyperparams.kernel.sigma2 == doctest::Approx(grid[1]).epsilon(0.05));
    CHECK(result.best_hyperparams.epsilon == doctest::Approx(grid[2]).epsilon(0.05));
}

TEST_CASE("a single generation returns a known-optimal member") {
    GaConfig c = small_config();
    c.generations = 1;
    const auto target = default_svr_hyperparams();
    const auto result = ga_optimize(
        [&](const SvrHyperparams& hp) {
            return std::abs(hp.C - target.C) + std::abs(hp.epsilon - target.epsilon) +
                   std::abs(hp.kernel.sigma2 - target.kernel.sigma2);
        },
        c);
    CHECK(result.best == default_chromosome());
    CHECK(result.best_fitness == 0.0);
    CHECK(result.history.size() == 1);
}

TEST_CASE("ga_run: determinism, history, evaluation count and log") {
    const auto data = small_dataset(11);
    GaConfig c = small_config(21);
    const auto a = ga_run(data.X, data.y, c);
    const auto b = ga_run(data.X, data.y, c);
    CHECK(a.best == b.best);
    CHECK(a.history == b.history);
    CHECK(a.history.size() == c.generations);
    CHECK(a.evaluations == c.population_size * c.generations);
    for (std::size_t g = 1; g < a.history.size(); ++g) {
        CHECK(a.history[g] <= a.history[g - 1]);
    }
    std::ostringstream log;
    write_ga_log_csv(log, a);
    const std::string text = log.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(c.generations + 1));

    GaConfig threaded = c;
    threaded.threads = 3;
    const auto t = ga_run(data.X, data.y, threaded);
    CHECK(t.best == a.best);
    CHECK(t.history == a.history);
}

TEST_CASE("GA-SVR training RMSE never exceeds the default SVR") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto data = small_dataset(seed);
        const auto result = ga_run(data.X, data.y, small_config(seed));
        const auto baseline = svr_fit(data.X, data.y, default_svr_hyperparams());
        const double baseline_rmse = rmse(svr_predict(baseline, data.X), data.y);
        CHECK(result.best_fitness <= baseline_rmse);
        const auto tuned = svr_fit(data.X, data.y, result.best_hyperparams);
        CHECK(rmse(svr_predict(tuned, data.X), data.y) == result.best_fitness);
    }
}

TEST_CASE("ga_optimize calls the fitness once per distinct chromosome") {
    GaConfig c = small_config(9);
    c.population_size = 6;
    c.generations = 12;
    c.crossover_probability = 0.0;
    c.mutation_probability = 0.0;
    std::set<std::array<double, 3>> seen;
    std::size_t calls = 0;
    const auto result = ga_optimize(
        [&](const SvrHyperparams& hp) {
            ++calls;
            seen.insert(Chromosome::encode(hp).genes);
            return std::abs(std::log10(hp.C) - 1.0);
        },
        c);
    CHECK(result.evaluations == c.population_size * c.generations);
    CHECK(calls <= c.population_size);
    CHECK(calls == seen.size());
}
