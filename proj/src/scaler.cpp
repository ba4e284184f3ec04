#include "wrisk/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wrisk {
namespace {

struct Moments {
    double mean = 0.0;
    double std = 1.0;
    bool constant = false;
};

// Population moments; a zero spread maps to std 1.
template <typename Get>
Moments moments(std::size_t n, Get get) {
    Moments m;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += get(i);
    }
    m.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = get(i) - m.mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd > 1e-12 * std::max(1.0, std::abs(m.mean))) {
        m.std = sd;
    } else {
        m.constant = true;
    }
    return m;
}

} // namespace

Scaler Scaler::fit(const Matrix& X, std::span<const double> y) {
    if (X.rows() == 0 || X.rows() != y.size()) {
        throw std::invalid_argument("Scaler::fit: need matching, non-empty X and y");
    }
    Scaler s;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        auto m = moments(X.rows(), [&](std::size_t i) { return X(i, j); });
        s.feature_mean.push_back(m.mean);
        s.feature_std.push_back(m.std);
        s.feature_constant.push_back(m.constant);
    }
    auto t = moments(y.size(), [&](std::size_t i) { return y[i]; });
    s.target_mean = t.mean;
    s.target_std = t.std;
    s.target_constant = t.constant;
    return s;
}

Scaler Scaler::identity(std::size_t features) {
    Scaler s;
    s.feature_mean.assign(features, 0.0);
    s.feature_std.assign(features, 1.0);
    s.feature_constant.assign(features, false);
    return s;
}

std::vector<double> Scaler::transform_row(std::span<const double> x) const {
    if (x.size() != dimension()) {
        throw std::invalid_argument("Scaler: expected " + std::to_string(dimension()) + " features, got " +
                                    std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = (x[j] - feature_mean[j]) / feature_std[j];
    }
    return out;
}

Matrix Scaler::transform(const Matrix& X) const {
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto row = transform_row(X.row(i));
        for (std::size_t j = 0; j < row.size(); ++j) {
            out(i, j) = row[j];
        }
    }
    return out;
}

} // namespace wrisk
