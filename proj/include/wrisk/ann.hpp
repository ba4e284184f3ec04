#pragma once

#include "wrisk/matrix.hpp"
#include "wrisk/scaler.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wrisk {

/// Parameters of a one-hidden-layer network with sigmoid hidden units and an
/// identity output:
///   Z_j = sigmoid(hidden_bias_j + sum_i hidden_weights(j, i) x_i)
///   Y   = output_bias + sum_j output_weights_j Z_j
struct AnnWeights {
    Matrix hidden_weights; // H x m
    std::vector<double> hidden_bias;
    std::vector<double> output_weights;
    double output_bias = 0.0;

    static AnnWeights zeros(std::size_t inputs, std::size_t hidden);

    std::size_t inputs() const noexcept { return hidden_weights.cols(); }
    std::size_t hidden() const noexcept { return hidden_weights.rows(); }
    std::size_t parameter_count() const noexcept { return hidden() * (inputs() + 2) + 1; }

    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);

    friend bool operator==(const AnnWeights&, const AnnWeights&) = default;
};

struct AnnModel {
    AnnWeights weights;
    Scaler scaler;

    std::size_t dimension() const noexcept { return weights.inputs(); }

    friend bool operator==(const AnnModel&, const AnnModel&) = default;
};

struct AnnTrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 5000;
    std::uint64_t seed = 1;
    double init_scale = 0.5;
    std::optional<std::size_t> batch_size; // full batch when unset
};

void validate(const AnnTrainConfig& config);

double sigmoid(double v);

/// Hidden activations for an already standardized input.
std::vector<double> ann_hidden(const AnnWeights& weights, std::span<const double> scaled_x);

/// Network output in original target units.
double ann_forward(const AnnModel& model, std::span<const double> x);
std::vector<double> ann_predict(const AnnModel& model, const Matrix& X);

/// Gradient of 1/2 (Y - y)^2 with respect to every weight, where Y and y are
/// in the model's standardized target units. Throws FitError if an
/// intermediate is not finite.
AnnWeights ann_gradient(const AnnModel& model, std::span<const double> x, double y_target);

struct AnnTrainResult {
    AnnModel model;
    std::vector<double> loss_history; // mean 1/2 squared error per epoch, standardized units
};

/// Gradient descent on the mean squared error of the standardized data.
/// Throws FitError naming the epoch if the loss stops being finite.
AnnTrainResult ann_train(const Matrix& X, std::span<const double> y, std::size_t hidden,
                         const AnnTrainConfig& config);

} // namespace wrisk
