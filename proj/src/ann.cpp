#include "wrisk/ann.hpp"

#include "wrisk/error.hpp"
#include "wrisk/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wrisk {
namespace {

void check_dimension(const AnnWeights& w, std::size_t got) {
    if (got != w.inputs()) {
        throw std::invalid_argument("ann: expected " + std::to_string(w.inputs()) + " inputs, got " +
                                    std::to_string(got));
    }
}

double output_scaled(const AnnWeights& w, std::span<const double> hidden) {
    double y = w.output_bias;
    for (std::size_t j = 0; j < hidden.size(); ++j) {
        y += w.output_weights[j] * hidden[j];
    }
    return y;
}

// Accumulates scale * d(1/2 (Y - y)^2)/dw into `grad` for a standardized sample.
void accumulate_gradient(const AnnWeights& w, std::span<const double> x, double y, double scale,
                         AnnWeights& grad) {
    const auto z = ann_hidden(w, x);
    const double err = output_scaled(w, z) - y;
    grad.output_bias += scale * err;
    for (std::size_t j = 0; j < w.hidden(); ++j) {
        grad.output_weights[j] += scale * err * z[j];
        const double back = err * w.output_weights[j] * z[j] * (1.0 - z[j]);
        grad.hidden_bias[j] += scale * back;
        for (std::size_t i = 0; i < w.inputs(); ++i) {
            grad.hidden_weights(j, i) += scale * back * x[i];
        }
    }
}

bool all_finite(const AnnWeights& w) {
    const auto flat = w.flatten();
    return std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); });
}

} // namespace

AnnWeights AnnWeights::zeros(std::size_t inputs, std::size_t hidden) {
    AnnWeights w;
    w.hidden_weights = Matrix(hidden, inputs);
    w.hidden_bias.assign(hidden, 0.0);
    w.output_weights.assign(hidden, 0.0);
    return w;
}

std::vector<double> AnnWeights::flatten() const {
    std::vector<double> flat(hidden_weights.data());
    flat.insert(flat.end(), hidden_bias.begin(), hidden_bias.end());
    flat.insert(flat.end(), output_weights.begin(), output_weights.end());
    flat.push_back(output_bias);
    return flat;
}

void AnnWeights::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw std::invalid_argument("AnnWeights::assign: wrong parameter count");
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < hidden(); ++j) {
        for (std::size_t i = 0; i < inputs(); ++i) {
            hidden_weights(j, i) = flat[k++];
        }
    }
    for (auto& b : hidden_bias) {
        b = flat[k++];
    }
    for (auto& v : output_weights) {
        v = flat[k++];
    }
    output_bias = flat[k];
}

void validate(const AnnTrainConfig& config) {
    if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
        throw ConfigError("ann: learning_rate must be non-negative and finite");
    }
    if (config.epochs < 1) {
        throw ConfigError("ann: epochs must be at least 1");
    }
    if (!(config.init_scale >= 0.0)) {
        throw ConfigError("ann: init_scale must be non-negative");
    }
    if (config.batch_size && *config.batch_size == 0) {
        throw ConfigError("ann: batch_size must be positive");
    }
}

double sigmoid(double v) {
    // Split by sign so exp never overflows.
    if (v >= 0.0) {
        return 1.0 / (1.0 + std::exp(-v));
    }
    const double e = std::exp(v);
    return e / (1.0 + e);
}

std::vector<double> ann_hidden(const AnnWeights& w, std::span<const double> scaled_x) {
    check_dimension(w, scaled_x.size());
    std::vector<double> z(w.hidden());
    for (std::size_t j = 0; j < w.hidden(); ++j) {
        double v = w.hidden_bias[j];
        const auto row = w.hidden_weights.row(j);
        for (std::size_t i = 0; i < row.size(); ++i) {
            v += row[i] * scaled_x[i];
        }
        z[j] = sigmoid(v);
    }
    return z;
}

double ann_forward(const AnnModel& model, std::span<const double> x) {
    check_dimension(model.weights, x.size());
    const auto scaled = model.scaler.transform_row(x);
    return model.scaler.inverse_target(output_scaled(model.weights, ann_hidden(model.weights, scaled)));
}

std::vector<double> ann_predict(const AnnModel& model, const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = ann_forward(model, X.row(i));
    }
    return out;
}

AnnWeights ann_gradient(const AnnModel& model, std::span<const double> x, double y_target) {
    check_dimension(model.weights, x.size());
    const auto scaled = model.scaler.transform_row(x);
    AnnWeights grad = AnnWeights::zeros(model.weights.inputs(), model.weights.hidden());
    accumulate_gradient(model.weights, scaled, model.scaler.transform_target(y_target), 1.0, grad);
    if (!all_finite(grad)) {
        throw FitError("ann_gradient: non-finite gradient");
    }
    return grad;
}

AnnTrainResult ann_train(const Matrix& X, std::span<const double> y, std::size_t hidden,
                         const AnnTrainConfig& config) {
    validate(config);
    if (hidden < 1) {
        throw ConfigError("ann: hidden size must be at least 1");
    }
    if (X.rows() < 1 || X.rows() != y.size()) {
        throw FitError("ann_train: need at least one aligned training row");
    }
    for (double v : X.data()) {
        if (!std::isfinite(v)) {
            throw FitError("ann_train: non-finite feature value");
        }
    }

    AnnTrainResult result;
    AnnModel& model = result.model;
    model.scaler = Scaler::fit(X, y);
    const Matrix xs = model.scaler.transform(X);
    std::vector<double> ys(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        ys[i] = model.scaler.transform_target(y[i]);
    }

    Rng rng{config.seed};
    std::uniform_real_distribution<double> init(-config.init_scale, config.init_scale);
    model.weights = AnnWeights::zeros(X.cols(), hidden);
    auto flat = model.weights.flatten();
    for (auto& v : flat) {
        v = init(rng);
    }
    model.weights.assign(flat);

    const std::size_t n = X.rows();
    const std::size_t batch = std::min(config.batch_size.value_or(n), n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    const auto mean_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = output_scaled(model.weights, ann_hidden(model.weights, xs.row(i))) - ys[i];
            loss += 0.5 * r * r;
        }
        return loss / static_cast<double>(n);
    };

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (batch < n) {
            std::shuffle(order.begin(), order.end(), rng);
        }
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(start + batch, n);
            AnnWeights grad = AnnWeights::zeros(X.cols(), hidden);
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (std::size_t k = start; k < stop; ++k) {
                accumulate_gradient(model.weights, xs.row(order[k]), ys[order[k]], scale, grad);
            }
            auto w = model.weights.flatten();
            const auto g = grad.flatten();
            for (std::size_t k = 0; k < w.size(); ++k) {
                w[k] -= config.learning_rate * g[k];
            }
            model.weights.assign(w);
        }
        const double loss = mean_loss();
        if (!std::isfinite(loss) || !all_finite(model.weights)) {
            throw FitError("ann_train: loss diverged at epoch " + std::to_string(epoch + 1));
        }
        result.loss_history.push_back(loss);
    }
    return result;
}

} // namespace wrisk
