#include "wrisk/ann.hpp"
#include "wrisk/error.hpp"
#include "wrisk/metrics.hpp"

#include "support/ann_checks.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wrisk;

namespace {

AnnModel identity_model(std::size_t inputs, std::size_t hidden) {
    AnnModel m;
    m.weights = AnnWeights::zeros(inputs, hidden);
    m.scaler = Scaler::identity(inputs);
    return m;
}

struct Linear {
    Matrix X;
    std::vector<double> y;
};

Linear linear_target(std::size_t n) {
    Linear d{Matrix(n, 1), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        d.X(i, 0) = x;
        d.y.push_back(2.0 * x);
    }
    return d;
}

} // namespace

TEST_CASE("ann_forward hand evaluations") {
    auto zero = identity_model(4, 2);
    const std::vector<double> x{0.3, -2.0, 1.0, 5.0};
    CHECK(ann_forward(zero, x) == 0.0);
    for (double z : ann_hidden(zero.weights, x)) {
        CHECK(z == 0.5);
    }

    auto m = identity_model(4, 1);
    m.weights.hidden_weights(0, 0) = 1.0;
    m.weights.output_weights = {2.0};
    m.weights.output_bias = 1.0;
    CHECK(ann_forward(m, std::vector<double>{0.0, 7.0, -3.0, 2.0}) == 2.0);

    auto head = identity_model(3, 2);
    head.weights.hidden_weights(0, 1) = 4.0;
    head.weights.hidden_bias = {0.2, -0.7};
    head.weights.output_bias = -3.25;
    CHECK(ann_forward(head, std::vector<double>{1, 2, 3}) == -3.25);
    CHECK(ann_forward(head, std::vector<double>{-9, 0, 3}) == -3.25);

    CHECK_THROWS_AS(ann_forward(head, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("ann_forward applies the target scaler") {
    auto m = identity_model(1, 1);
    m.scaler.target_mean = 10.0;
    m.scaler.target_std = 4.0;
    m.weights.output_bias = 0.5;
    CHECK(ann_forward(m, std::vector<double>{0.0}) == 12.0);
}

TEST_CASE("ann_gradient basics") {
    auto m = identity_model(2, 2);
    m.weights.output_weights = {0.3, -0.8};
    m.weights.hidden_weights(1, 0) = 0.4;
    const std::vector<double> x{0.7, -0.2};
    const double y_hat = ann_forward(m, x);
    for (double g : ann_gradient(m, x, y_hat).flatten()) {
        CHECK(g == 0.0);
    }
    const double target = 1.5;
    CHECK(ann_gradient(m, x, target).output_bias == doctest::Approx(y_hat - target).epsilon(1e-15));
    CHECK_THROWS_AS(ann_gradient(m, std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("ann_gradient matches central finite differences") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 50; ++k) {
        const auto c = check::random_gradient_case(rng);
        CHECK(check::gradient_relative_error(c) < 1e-5);
    }
}

TEST_CASE("hidden activations stay strictly inside (0, 1)") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k) {
        const auto c = check::random_gradient_case(rng);
        for (double z : ann_hidden(c.model.weights, c.x)) {
            CHECK(z > 0.0);
            CHECK(z < 1.0);
        }
    }
}

TEST_CASE("ann_train recovers a linear target") {
    const auto d = linear_target(50);
    AnnTrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 20000;
    const auto result = ann_train(d.X, d.y, 2, cfg);
    const double scaled = rmse(ann_predict(result.model, d.X), d.y) / result.model.scaler.target_std;
    CHECK(scaled < 0.05);
}

TEST_CASE("ann_train with learning rate 0 keeps the initial weights") {
    const auto d = linear_target(20);
    AnnTrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 10;
    const auto a = ann_train(d.X, d.y, 3, cfg);
    cfg.epochs = 1;
    const auto b = ann_train(d.X, d.y, 3, cfg);
    CHECK(a.model == b.model);
    for (double l : a.loss_history) {
        CHECK(l == a.loss_history.front());
    }
}

TEST_CASE("ann_train is deterministic") {
    const auto d = linear_target(30);
    AnnTrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 5;
    CHECK(ann_train(d.X, d.y, 2, cfg).model == ann_train(d.X, d.y, 2, cfg).model);
    cfg.batch_size = 7;
    CHECK(ann_train(d.X, d.y, 2, cfg).model == ann_train(d.X, d.y, 2, cfg).model);
}

TEST_CASE("full-batch loss does not increase at a small learning rate") {
    const auto d = linear_target(40);
    AnnTrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 2000;
    const auto r = ann_train(d.X, d.y, 2, cfg);
    for (std::size_t e = 1; e < r.loss_history.size(); ++e) {
        CHECK(r.loss_history[e] <= r.loss_history[e - 1]);
    }
}

TEST_CASE("scaler round trip: predictions come back in original units") {
    Linear d = linear_target(40);
    for (auto& v : d.y) {
        v = 1000.0 + 250.0 * v;
    }
    AnnTrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 5000;
    const auto r = ann_train(d.X, d.y, 2, cfg);
    const auto& s = r.model.scaler;
    CHECK(s.inverse_target(s.transform_target(1234.5)) == doctest::Approx(1234.5));
    const auto pred = ann_predict(r.model, d.X);
    CHECK(rmse(pred, d.y) < 0.05 * s.target_std);
}

TEST_CASE("ann_train reports divergence and bad configuration") {
    const auto d = linear_target(30);
    AnnTrainConfig cfg;
    cfg.learning_rate = 1e6;
    cfg.epochs = 200;
    try {
        ann_train(d.X, d.y, 2, cfg);
        FAIL("expected divergence");
    } catch (const FitError& e) {
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
    cfg = AnnTrainConfig{};
    cfg.epochs = 0;
    CHECK_THROWS_AS(ann_train(d.X, d.y, 2, cfg), ConfigError);
    cfg = AnnTrainConfig{};
    cfg.learning_rate = -1;
    CHECK_THROWS_AS(ann_train(d.X, d.y, 2, cfg), ConfigError);
    CHECK_THROWS_AS(ann_train(d.X, d.y, 0, AnnTrainConfig{}), ConfigError);
}
