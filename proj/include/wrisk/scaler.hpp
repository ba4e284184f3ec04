#pragma once

#include "wrisk/matrix.hpp"

#include <span>
#include <vector>

namespace wrisk {

/// Z-score standardization of features and target. Constant columns keep a
/// standard deviation of 1 and are flagged.
struct Scaler {
    std::vector<double> feature_mean;
    std::vector<double> feature_std;
    std::vector<bool> feature_constant;
    double target_mean = 0.0;
    double target_std = 1.0;
    bool target_constant = false;

    static Scaler fit(const Matrix& X, std::span<const double> y);
    static Scaler identity(std::size_t features);

    std::size_t dimension() const noexcept { return feature_mean.size(); }

    std::vector<double> transform_row(std::span<const double> x) const;
    Matrix transform(const Matrix& X) const;
    double transform_target(double y) const { return (y - target_mean) / target_std; }
    double inverse_target(double scaled) const { return scaled * target_std + target_mean; }

    friend bool operator==(const Scaler&, const Scaler&) = default;
};

} // namespace wrisk
