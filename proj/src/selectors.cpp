#include "jsel/selectors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "jsel/rng.hpp"

namespace jsel {

void validate(const SelectorSpec& spec) {
    if (!(spec.lambda > 0.0)) throw param_error("SelectorSpec: lambda must be > 0");
    if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
        throw param_error("SelectorSpec: alpha must lie in (0, 1]");
    if (spec.kind == SelectorKind::lasso && spec.alpha != 1.0)
        throw param_error("SelectorSpec: lasso requires alpha = 1");
    if (spec.max_iter < 1) throw param_error("SelectorSpec: max_iter must be >= 1");
    if (!(spec.tol > 0.0)) throw param_error("SelectorSpec: tol must be > 0");
    if (spec.zero_tol < 0.0) throw param_error("SelectorSpec: zero_tol must be >= 0");
}

double objective_value(const Matrix& x, const Vector& y, const Vector& beta,
                       const SelectorSpec& spec) {
    const double n = static_cast<double>(x.rows());
    const double rss = (y - x * beta).squaredNorm();
    return rss / (2.0 * n) +
           spec.lambda * (spec.alpha * beta.lpNorm<1>() +
                          0.5 * (1.0 - spec.alpha) * beta.squaredNorm());
}

namespace {

// One cyclic pass over `order`; returns the max coordinate change.
double sweep(const Matrix& x, Vector& beta, Vector& residual, const Vector& col_sq,
             double inv_n, double l1, double l2, const int* order, int count) {
    double max_delta = 0.0;
    for (int t = 0; t < count; ++t) {
        const int j = order[t];
        const double bj = beta[j];
        const double z = inv_n * x.col(j).dot(residual) + col_sq[j] * bj;
        double nb = soft_threshold(z, l1);
        if (nb != 0.0) nb /= (col_sq[j] + l2);
        const double d = nb - bj;
        if (d != 0.0) {
            residual -= d * x.col(j);
            beta[j] = nb;
            const double ad = std::abs(d);
            if (ad > max_delta) max_delta = ad;
        }
    }
    return max_delta;
}

}  // namespace

CoefficientVector fit(const Matrix& x, const Vector& y, const SelectorSpec& spec) {
    validate(spec);
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) throw param_error("fit: X and y dimensions disagree");
    if (n < 1 || p < 1) throw param_error("fit: empty problem");
    if (!x.allFinite() || !y.allFinite()) throw param_error("fit: inputs contain NaN or Inf");

    const double inv_n = 1.0 / static_cast<double>(n);
    const double l1 = spec.lambda * spec.alpha;
    const double l2 = spec.lambda * (1.0 - spec.alpha);

    Vector col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq[j] = inv_n * x.col(j).squaredNorm();

    CoefficientVector out;
    out.beta = Vector::Zero(p);
    Vector residual = y;

    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> active;
    active.reserve(64);

    int sweeps = 0;
#ifndef NDEBUG
    double prev_obj = objective_value(x, y, out.beta, spec);
#endif
    while (sweeps < spec.max_iter) {
        const double full_delta =
            sweep(x, out.beta, residual, col_sq, inv_n, l1, l2, all.data(), static_cast<int>(p));
        ++sweeps;
#ifndef NDEBUG
        {
            const double obj = objective_value(x, y, out.beta, spec);
            assert(obj <= prev_obj + 1e-12 * std::max(1.0, std::abs(prev_obj)));
            prev_obj = obj;
        }
#endif
        if (full_delta <= spec.tol) {
            out.converged = true;
            break;
        }
        // Polish the current active set before paying for another full pass.
        active.clear();
        for (Eigen::Index j = 0; j < p; ++j)
            if (out.beta[j] != 0.0) active.push_back(static_cast<int>(j));
        while (!active.empty() && sweeps < spec.max_iter) {
            const double d = sweep(x, out.beta, residual, col_sq, inv_n, l1, l2, active.data(),
                                   static_cast<int>(active.size()));
            ++sweeps;
            if (d <= spec.tol) break;
        }
    }

    out.n_iter = sweeps;
    out.objective = objective_value(x, y, out.beta, spec);
    return out;
}

IndexSet support(const CoefficientVector& coef, double zero_tol) {
    if (zero_tol < 0.0) throw param_error("support: zero_tol must be >= 0");
    IndexSet s;
    for (Eigen::Index j = 0; j < coef.beta.size(); ++j)
        if (std::abs(coef.beta[j]) > zero_tol) s.push_back(static_cast<int>(j));
    return s;
}

double kkt_residual(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                    double alpha) {
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    const Vector residual = y - x * beta;
    const double l1 = lambda * alpha;
    const double l2 = lambda * (1.0 - alpha);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double g = inv_n * x.col(j).dot(residual);
        double viol;
        if (beta[j] != 0.0)
            viol = std::abs(g - l2 * beta[j] - l1 * (beta[j] > 0.0 ? 1.0 : -1.0));
        else
            viol = std::max(std::abs(g) - l1, 0.0);
        if (viol > worst) worst = viol;
    }
    return worst;
}

double default_lambda(int n, int p) {
    if (n < 1) throw param_error("default_lambda: n must be >= 1");
    if (p < 2) throw param_error("default_lambda: p must be >= 2");
    return std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double lambda_max(const Matrix& x, const Vector& y, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw param_error("lambda_max: alpha must be in (0, 1]");
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    return (x.transpose() * y).cwiseAbs().maxCoeff() * inv_n / alpha;
}

CvCurve cv_curve(const Matrix& x, const Vector& y, double alpha, int folds, std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    if (folds < 2) throw param_error("cv_lambda_1se: folds must be >= 2");
    if (n < folds) throw param_error("cv_lambda_1se: need at least one row per fold");

    const double lmax = lambda_max(x, y, alpha);
    if (!(lmax > 0.0))
        throw data_error("cv_lambda_1se: lambda_max is zero, response carries no signal");

    constexpr int kGridSize = 100;
    constexpr double kGridSpan = 1e-3;
    std::vector<double> grid(kGridSize);
    for (int k = 0; k < kGridSize; ++k)
        grid[k] = lmax * std::pow(kGridSpan, static_cast<double>(k) / (kGridSize - 1));

    // Seeded shuffle, then contiguous blocks as folds.
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto k = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[i], perm[k]);
    }

    CvCurve curve;
    curve.grid = grid;
    curve.fold_of_row.assign(static_cast<std::size_t>(n), 0);

    Matrix fold_mse(folds, kGridSize);
    for (int f = 0; f < folds; ++f) {
        const Eigen::Index lo = n * f / folds;
        const Eigen::Index hi = n * (f + 1) / folds;
        const Eigen::Index n_test = hi - lo;
        const Eigen::Index n_train = n - n_test;

        Matrix x_train(n_train, x.cols()), x_test(n_test, x.cols());
        Vector y_train(n_train), y_test(n_test);
        Eigen::Index it = 0, iv = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = perm[i];
            if (i >= lo && i < hi) {
                curve.fold_of_row[static_cast<std::size_t>(row)] = f;
                x_test.row(iv) = x.row(row);
                y_test[iv++] = y[row];
            } else {
                x_train.row(it) = x.row(row);
                y_train[it++] = y[row];
            }
        }

        // Warm start down the grid: reuse the previous beta as the next
        // starting point via explicit residual bookkeeping.
        SelectorSpec spec;
        spec.kind = alpha == 1.0 ? SelectorKind::lasso : SelectorKind::enet;
        spec.alpha = alpha;
        Vector beta = Vector::Zero(x.cols());
        Vector residual = y_train;
        const double inv_n = 1.0 / static_cast<double>(n_train);
        Vector col_sq(x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            col_sq[j] = inv_n * x_train.col(j).squaredNorm();
        std::vector<int> all(static_cast<std::size_t>(x.cols()));
        std::iota(all.begin(), all.end(), 0);

        for (int k = 0; k < kGridSize; ++k) {
            const double l1 = grid[k] * alpha;
            const double l2 = grid[k] * (1.0 - alpha);
            for (int it_sweep = 0; it_sweep < spec.max_iter; ++it_sweep) {
                const double d = sweep(x_train, beta, residual, col_sq, inv_n, l1, l2, all.data(),
                                       static_cast<int>(x.cols()));
                if (d <= spec.tol) break;
            }
            fold_mse(f, k) = (y_test - x_test * beta).squaredNorm() / static_cast<double>(n_test);
        }
    }

    curve.fold_mse = fold_mse;
    curve.mean_mse = fold_mse.colwise().mean();
    curve.min_index = 0;
    for (int k = 1; k < kGridSize; ++k)
        if (curve.mean_mse[k] < curve.mean_mse[curve.min_index]) curve.min_index = k;

    const Vector at_best = fold_mse.col(curve.min_index);
    const double sd = std::sqrt((at_best.array() - curve.mean_mse[curve.min_index]).square().sum() /
                                static_cast<double>(folds - 1));
    curve.se_at_min = sd / std::sqrt(static_cast<double>(folds));
    const double cutoff = curve.mean_mse[curve.min_index] + curve.se_at_min;

    // Grid is descending, so the first index meeting the cutoff is the
    // largest qualifying lambda.
    curve.chosen_index = curve.min_index;
    for (int k = 0; k < kGridSize; ++k)
        if (curve.mean_mse[k] <= cutoff) {
            curve.chosen_index = k;
            break;
        }
    return curve;
}

double cv_lambda_1se(const Matrix& x, const Vector& y, double alpha, int folds,
                     std::uint64_t seed) {
    const CvCurve curve = cv_curve(x, y, alpha, folds, seed);
    return curve.grid[static_cast<std::size_t>(curve.chosen_index)];
}

}  // namespace jsel
