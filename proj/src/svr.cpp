#include "wrisk/svr.hpp"

#include "wrisk/error.hpp"
#include "wrisk/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wrisk {
namespace {

constexpr double kTau = 1e-12; // curvature floor for non-positive-definite pairs

void check_finite(const Matrix& X, std::span<const double> y) {
    for (double v : X.data()) {
        if (!std::isfinite(v)) {
            throw FitError("svr_fit: non-finite feature value");
        }
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw FitError("svr_fit: non-finite target value");
        }
    }
}

// Four independent accumulators keep the reduction off one dependency chain.
double max_of(const double* a, std::size_t n) {
    double m0 = -std::numeric_limits<double>::infinity();
    double m1 = m0;
    double m2 = m0;
    double m3 = m0;
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        m0 = std::max(m0, a[t]);
        m1 = std::max(m1, a[t + 1]);
        m2 = std::max(m2, a[t + 2]);
        m3 = std::max(m3, a[t + 3]);
    }
    for (; t < n; ++t) {
        m0 = std::max(m0, a[t]);
    }
    return std::max(std::max(m0, m1), std::max(m2, m3));
}

double min_of(const double* a, std::size_t n) {
    double m0 = std::numeric_limits<double>::infinity();
    double m1 = m0;
    double m2 = m0;
    double m3 = m0;
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        m0 = std::min(m0, a[t]);
        m1 = std::min(m1, a[t + 1]);
        m2 = std::min(m2, a[t + 2]);
        m3 = std::min(m3, a[t + 3]);
    }
    for (; t < n; ++t) {
        m0 = std::min(m0, a[t]);
    }
    return std::min(std::min(m0, m1), std::min(m2, m3));
}

// Last index holding `value`; ties resolve to the highest index.
std::size_t last_index_of(const double* a, std::size_t n, double value) {
    std::size_t t = n;
    while (t > 0 && a[t - 1] != value) {
        --t;
    }
    return t - 1;
}

// SMO over the 2n-variable form
//   min 1/2 b'Qb + p'b,  z'b = 0,  0 <= b <= C
// with b = (alpha*, alpha), z = (+1.., -1..), p = (eps - y, eps + y) and
// Q_st = z_s z_t K. The objective is the negated dual.
class SmoSolver {
public:
    SmoSolver(const Matrix& K, std::span<const double> y, double C, double epsilon, const SvrSolverOptions& opt)
        : K_(K), n_(y.size()), l_(2 * y.size()), C_(C), opt_(opt), beta_(l_, 0.0), grad_(l_), p_(l_) {
        for (std::size_t i = 0; i < n_; ++i) {
            p_[i] = epsilon - y[i];
            p_[i + n_] = epsilon + y[i];
        }
        grad_ = p_;
        for (std::size_t r = 0; r < n_; ++r) {
            diag_.push_back(K_(r, r));
        }
    }

    SolverStats solve() {
        SolverStats stats;
        if (opt_.record_objective) {
            stats.objective_trace.push_back(dual_value());
        }
        while (true) {
            std::size_t i = 0;
            std::size_t j = 0;
            const double violation = select_pair(i, j);
            stats.max_violation = std::max(violation, 0.0);
            if (violation < opt_.tolerance || j == kNone) {
                break;
            }
            if (stats.iterations >= opt_.max_iterations) {
                throw FitError("svr_fit: no convergence after " + std::to_string(stats.iterations) +
                               " pair updates (max KKT violation " + format_double(violation) + ")");
            }
            update_pair(i, j);
            ++stats.iterations;
            if (opt_.record_objective) {
                stats.objective_trace.push_back(dual_value());
            }
        }
        return stats;
    }

    double theta(std::size_t i) const { return beta_[i] - beta_[i + n_]; }

    // Bias b of f(x) = sum theta_i k(x, x_i) + b: the average of -z_t G_t over
    // free variables, or the midpoint of the feasible interval if none.
    double bias() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t free = 0;
        for (std::size_t t = 0; t < l_; ++t) {
            const double zg = z(t) * grad_[t];
            if (beta_[t] >= C_) {
                if (z(t) < 0) {
                    ub = std::min(ub, zg);
                } else {
                    lb = std::max(lb, zg);
                }
            } else if (beta_[t] <= 0.0) {
                if (z(t) > 0) {
                    ub = std::min(ub, zg);
                } else {
                    lb = std::max(lb, zg);
                }
            } else {
                ++free;
                sum_free += zg;
            }
        }
        const double rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
        return -rho;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    double z(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
    double kern(std::size_t s, std::size_t t) const { return K_(s % n_, t % n_); }

    double dual_value() const {
        double obj = 0.0;
        for (std::size_t t = 0; t < l_; ++t) {
            obj += beta_[t] * (grad_[t] + p_[t]);
        }
        return -0.5 * obj;
    }

    // Maximal violating first index, second index by second-order gain.
    // Returns m(b) - M(b). Masked scores go to scratch arrays in branch-free
    // loops so they vectorize; ties resolve to the highest index.
    double select_pair(std::size_t& out_i, std::size_t& out_j) {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        const double* b = beta_.data();
        const double* g = grad_.data();
        double* up = up_score_.data();
        double* low = low_score_.data();
        const double C = C_;
        for (std::size_t t = 0; t < n_; ++t) {
            const double bt = b[t];
            const double gt = g[t];
            up[t] = bt < C ? -gt : -kInf;
            low[t] = bt > 0.0 ? gt : -kInf;
        }
        for (std::size_t t = n_; t < l_; ++t) {
            const double bt = b[t];
            const double gt = g[t];
            up[t] = bt > 0.0 ? gt : -kInf;
            low[t] = bt < C ? -gt : -kInf;
        }
        const double gmax = max_of(up, l_);
        if (gmax == -kInf) {
            out_i = out_j = kNone;
            return -kInf;
        }
        const std::size_t i = last_index_of(up, l_, gmax);

        const double kii = diag_[i % n_];
        const double* ki = K_.row(i % n_).data();
        const double* d = diag_.data();
        double* gain = gain_.data();
        for (std::size_t r = 0; r < n_; ++r) {
            double quad = kii + d[r] - 2.0 * ki[r];
            quad = quad > 0.0 ? quad : kTau;
            const double inv = 1.0 / quad;
            const double a = gmax + low[r];
            const double c = gmax + low[r + n_];
            // a and c are -inf for ineligible candidates.
            gain[r] = a > 0.0 ? -(a * a) * inv : kInf;
            gain[r + n_] = c > 0.0 ? -(c * c) * inv : kInf;
        }
        const double gmax2 = max_of(low, l_);
        const double best = min_of(gain, l_);
        const std::size_t j = best == kInf ? kNone : last_index_of(gain, l_, best);
        out_i = i;
        out_j = j;
        return gmax + gmax2;
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double old_i = beta_[i];
        const double old_j = beta_[j];
        double quad = diag_[i % n_] + diag_[j % n_] - 2.0 * kern(i, j);
        if (quad <= 0.0) {
            quad = kTau;
        }
        double& bi = beta_[i];
        double& bj = beta_[j];
        if (z(i) != z(j)) {
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = bi - bj;
            bi += delta;
            bj += delta;
            if (diff > 0.0) {
                if (bj < 0.0) {
                    bj = 0.0;
                    bi = diff;
                }
            } else if (bi < 0.0) {
                bi = 0.0;
                bj = -diff;
            }
            if (diff > 0.0) {
                if (bi > C_) {
                    bi = C_;
                    bj = C_ - diff;
                }
            } else if (bj > C_) {
                bj = C_;
                bi = C_ + diff;
            }
        } else {
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = bi + bj;
            bi -= delta;
            bj += delta;
            if (sum > C_) {
                if (bi > C_) {
                    bi = C_;
                    bj = sum - C_;
                }
            } else if (bj < 0.0) {
                bj = 0.0;
                bi = sum;
            }
            if (sum > C_) {
                if (bj > C_) {
                    bj = C_;
                    bi = sum - C_;
                }
            } else if (bi < 0.0) {
                bi = 0.0;
                bj = sum;
            }
        }
        const double di = bi - old_i;
        const double dj = bj - old_j;
        const double zi = z(i);
        const double zj = z(j);
        const double* ki = K_.row(i % n_).data();
        const double* kj = K_.row(j % n_).data();
        const double ci = zi * di;
        const double cj = zj * dj;
        double* g_star = grad_.data();
        double* g = grad_.data() + n_;
        for (std::size_t r = 0; r < n_; ++r) {
            const double u = ci * ki[r] + cj * kj[r];
            g_star[r] += u;
            g[r] -= u;
        }
    }

    const Matrix& K_;
    std::size_t n_;
    std::size_t l_;
    double C_;
    SvrSolverOptions opt_;
    std::vector<double> beta_;
    std::vector<double> grad_;
    std::vector<double> p_;
    std::vector<double> diag_;
    std::vector<double> up_score_ = std::vector<double>(l_);
    std::vector<double> low_score_ = std::vector<double>(l_);
    std::vector<double> gain_ = std::vector<double>(l_);
};

} // namespace

void validate(const SvrHyperparams& hp) {
    if (!(hp.C > 0.0) || !std::isfinite(hp.C)) {
        throw FitError("SVR: C must be positive and finite");
    }
    if (!(hp.epsilon >= 0.0) || !std::isfinite(hp.epsilon)) {
        throw FitError("SVR: epsilon must be non-negative and finite");
    }
    try {
        validate(hp.kernel);
    } catch (const std::invalid_argument& e) {
        throw FitError(std::string("SVR: ") + e.what());
    }
}

double eps_insensitive_loss(double residual, double epsilon) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("eps_insensitive_loss: epsilon must be non-negative");
    }
    return std::max(0.0, std::abs(residual) - epsilon);
}

SvrTrainResult svr_train(const Matrix& X, std::span<const double> y, const SvrHyperparams& hp,
                         const SvrSolverOptions& options) {
    validate(hp);
    if (X.rows() != y.size()) {
        throw FitError("svr_fit: X has " + std::to_string(X.rows()) + " rows but y has " +
                       std::to_string(y.size()) + " entries");
    }
    if (X.rows() < 2) {
        throw FitError("svr_fit: need at least 2 training rows");
    }
    check_finite(X, y);

    SvrTrainResult out;
    Scaler scaler = options.standardize ? Scaler::fit(X, y) : Scaler::identity(X.cols());
    out.scaled_X = scaler.transform(X);
    out.scaled_y.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out.scaled_y[i] = scaler.transform_target(y[i]);
    }

    const Matrix K = gram_matrix(out.scaled_X, hp.kernel);
    SmoSolver solver(K, out.scaled_y, hp.C, hp.epsilon, options);
    out.stats = solver.solve();

    const std::size_t n = y.size();
    out.alpha.assign(n, 0.0);
    out.alpha_star.assign(n, 0.0);
    SvrModel& model = out.model;
    model.hyperparams = hp;
    model.scaler = std::move(scaler);
    model.bias = solver.bias();
    model.support = Matrix(0, X.cols());
    for (std::size_t i = 0; i < n; ++i) {
        // Only the difference matters for f; keeping a single nonzero
        // member per pair can only raise the dual (the eps term shrinks).
        const double t = solver.theta(i);
        out.alpha_star[i] = std::max(t, 0.0);
        out.alpha[i] = std::max(-t, 0.0);
        if (t != 0.0) {
            model.theta.push_back(t);
            model.support.append_row(out.scaled_X.row(i));
        }
    }
    out.stats.dual_objective = dual_objective(out.alpha, out.alpha_star, out.scaled_X, out.scaled_y, hp);
    return out;
}

SvrModel svr_fit(const Matrix& X, std::span<const double> y, const SvrHyperparams& hp,
                 const SvrSolverOptions& options) {
    return svr_train(X, y, hp, options).model;
}

double svr_predict(const SvrModel& model, std::span<const double> x) {
    if (x.size() != model.dimension()) {
        throw std::invalid_argument("svr_predict: expected " + std::to_string(model.dimension()) +
                                    " features, got " + std::to_string(x.size()));
    }
    const auto scaled = model.scaler.transform_row(x);
    double f = model.bias;
    for (std::size_t i = 0; i < model.theta.size(); ++i) {
        f += model.theta[i] * kernel_eval(scaled, model.support.row(i), model.hyperparams.kernel);
    }
    return model.scaler.inverse_target(f);
}

std::vector<double> svr_predict(const SvrModel& model, const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = svr_predict(model, X.row(i));
    }
    return out;
}

double dual_objective(std::span<const double> alpha, std::span<const double> alpha_star, const Matrix& X,
                      std::span<const double> y, const SvrHyperparams& hp) {
    const std::size_t n = X.rows();
    if (alpha.size() != n || alpha_star.size() != n || y.size() != n) {
        throw std::invalid_argument("dual_objective: shape mismatch");
    }
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        theta[i] = alpha_star[i] - alpha[i];
    }
    double quad = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (theta[i] != 0.0) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (theta[j] != 0.0) {
                    row += theta[j] * kernel_eval(X.row(i), X.row(j), hp.kernel);
                }
            }
            quad += theta[i] * row;
        }
        linear += y[i] * theta[i] - hp.epsilon * (alpha[i] + alpha_star[i]);
    }
    return -0.5 * quad + linear;
}

} // namespace wrisk
