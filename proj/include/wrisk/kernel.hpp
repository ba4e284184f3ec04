#pragma once

#include "wrisk/matrix.hpp"

#include <span>

namespace wrisk {

struct KernelSpec {
    enum class Kind { Rbf, Linear };

    Kind kind = Kind::Rbf;
    double sigma2 = 1.0; // RBF bandwidth, unused for Linear

    static KernelSpec rbf(double sigma2) { return {Kind::Rbf, sigma2}; }
    static KernelSpec linear() { return {Kind::Linear, 1.0}; }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Throws std::invalid_argument for an RBF bandwidth that is not positive and finite.
void validate(const KernelSpec& spec);

/// RBF: exp(-|x - x'|^2 / (2 sigma2)); Linear: <x, x'>.
double kernel_eval(std::span<const double> x, std::span<const double> x_prime, const KernelSpec& spec);

/// K[i][j] = kernel_eval(row i, row j). The upper triangle is computed and
/// mirrored, so the result is exactly symmetric.
Matrix gram_matrix(const Matrix& X, const KernelSpec& spec);

} // namespace wrisk
