#include "wrisk/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace wrisk {

void validate(const KernelSpec& spec) {
    if (spec.kind == KernelSpec::Kind::Rbf && !(spec.sigma2 > 0.0 && std::isfinite(spec.sigma2))) {
        throw std::invalid_argument("RBF bandwidth sigma2 must be positive and finite");
    }
}

double kernel_eval(std::span<const double> x, std::span<const double> x_prime, const KernelSpec& spec) {
    if (x.size() != x_prime.size()) {
        throw std::invalid_argument("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                                    std::to_string(x_prime.size()) + ")");
    }
    double acc = 0.0;
    if (spec.kind == KernelSpec::Kind::Linear) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            acc += x[i] * x_prime[i];
        }
        return acc;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_prime[i];
        acc += d * d;
    }
    return std::exp(-acc / (2.0 * spec.sigma2));
}

Matrix gram_matrix(const Matrix& X, const KernelSpec& spec) {
    validate(spec);
    const std::size_t n = X.rows();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_eval(X.row(i), X.row(j), spec);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

} // namespace wrisk
