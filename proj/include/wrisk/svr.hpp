#pragma once

#include "wrisk/kernel.hpp"
#include "wrisk/matrix.hpp"
#include "wrisk/scaler.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace wrisk {

/// C is the per-point penalty (the inverse of the ridge weight on |beta|^2).
/// epsilon is the tube half-width in standardized target units.
struct SvrHyperparams {
    double C = 1.0;
    double epsilon = 0.1;
    KernelSpec kernel = KernelSpec::rbf(1.0);

    friend bool operator==(const SvrHyperparams&, const SvrHyperparams&) = default;
};

void validate(const SvrHyperparams& hp);

struct SvrSolverOptions {
    double tolerance = 1e-3;                 // maximal KKT violation at exit
    std::size_t max_iterations = 1'000'000;  // pair updates
    bool standardize = true;
    bool record_objective = false;           // keep the dual objective after every update
};

struct SolverStats {
    std::size_t iterations = 0;
    double max_violation = 0.0;
    double dual_objective = 0.0;
    std::vector<double> objective_trace;
};

/// Trained model. Only support vectors (theta != 0) are retained, in
/// standardized feature units.
struct SvrModel {
    Matrix support;
    std::vector<double> theta; // alpha*_i - alpha_i
    double bias = 0.0;
    SvrHyperparams hyperparams;
    Scaler scaler;

    std::size_t dimension() const noexcept { return scaler.dimension(); }
    std::size_t support_count() const noexcept { return theta.size(); }

    friend bool operator==(const SvrModel&, const SvrModel&) = default;
};

/// Full solver output: the model plus the dual variables over every training
/// row and the standardized data they refer to.
struct SvrTrainResult {
    SvrModel model;
    std::vector<double> alpha;
    std::vector<double> alpha_star;
    Matrix scaled_X;
    std::vector<double> scaled_y;
    SolverStats stats;
};

/// max(0, |r| - epsilon).
double eps_insensitive_loss(double residual, double epsilon);

/// Solves the epsilon-SVR dual
///   max  -1/2 sum_ij theta_i theta_j K_ij - eps sum_i (alpha_i + alpha*_i) + sum_i y_i theta_i
///   s.t. sum_i theta_i = 0,  0 <= alpha_i, alpha*_i <= C
/// with two-variable working-set (SMO) updates and second-order pair
/// selection. Throws FitError on non-finite data or when the iteration cap is
/// reached before the KKT violation drops below the tolerance.
SvrTrainResult svr_train(const Matrix& X, std::span<const double> y, const SvrHyperparams& hp,
                         const SvrSolverOptions& options = {});

SvrModel svr_fit(const Matrix& X, std::span<const double> y, const SvrHyperparams& hp,
                 const SvrSolverOptions& options = {});

/// f(x) = sum_i theta_i k(x, x_i) + b, returned in original target units.
double svr_predict(const SvrModel& model, std::span<const double> x);
std::vector<double> svr_predict(const SvrModel& model, const Matrix& X);

/// Dual objective for arbitrary (alpha, alpha*), evaluated on X and y as given.
double dual_objective(std::span<const double> alpha, std::span<const double> alpha_star,
                      const Matrix& X, std::span<const double> y, const SvrHyperparams& hp);

} // namespace wrisk
