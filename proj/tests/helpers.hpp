#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "jsel/common.hpp"
#include "jsel/rng.hpp"
#include "jsel/selectors.hpp"

namespace jsel::testing {

// Independent lasso oracle: FISTA with gradient restarts on the Gram
// formulation, stopped by the duality gap
//   gap(b) = P(b) - D(r / (n c)),  c = max(1, ||X'r||_inf / (n lambda)).
// Shares no code with the coordinate-descent solver it checks.
inline Vector prox_gradient_lasso(const Matrix& x, const Vector& y, double lambda,
                                  double gap_tol = 1e-10, long max_iter = 5000000) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Matrix q = (x.transpose() * x) * inv_n;
    const Vector c = (x.transpose() * y) * inv_n;
    const double y_sq = y.squaredNorm();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
    const double lipschitz = eig.eigenvalues().maxCoeff();
    Vector beta = Vector::Zero(p);
    if (lipschitz <= 0.0) return beta;
    const double step = 1.0 / lipschitz;

    auto duality_gap = [&](const Vector& b) {
        const Vector r = y - x * b;
        const double primal = r.squaredNorm() * inv_n / 2.0 + lambda * b.lpNorm<1>();
        const double corr = (x.transpose() * r).cwiseAbs().maxCoeff() * inv_n;
        const double scale = std::max(1.0, corr / lambda);
        const double dual = (y_sq - (r / scale - y).squaredNorm()) * inv_n / 2.0;
        return primal - dual;
    };

    Vector z = beta, beta_prev = beta;
    double t = 1.0;
    for (long it = 0; it < max_iter; ++it) {
        const Vector grad = q * z - c;
        Vector next = z - step * grad;
        for (Eigen::Index j = 0; j < p; ++j) next[j] = soft_threshold(next[j], step * lambda);

        // Gradient-based restart keeps the momentum from overshooting.
        if (grad.dot(next - beta) > 0.0) {
            t = 1.0;
            z = next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = next + ((t - 1.0) / t_next) * (next - beta);
            t = t_next;
        }
        beta_prev = beta;
        beta = next;
        if (it % 10 == 9 && duality_gap(beta) <= gap_tol) return beta;
    }
    throw numeric_error("prox_gradient_lasso: duality gap " +
                        std::to_string(duality_gap(beta)) + " not reached");
}

inline Matrix random_gaussian(int n, int p, Rng& rng) {
    Matrix x(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.next_gaussian();
    return x;
}

struct LassoInstance {
    Matrix x;
    Vector y;
    double lambda = 0.0;
};

// Random instance with occasional chain-correlated columns and a sparse
// ground truth; lambda is a random fraction of lambda_max.
inline LassoInstance random_lasso_instance(Rng& rng, int max_n = 50, int max_p = 100) {
    const int n = 15 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_n - 14)));
    const int p = 10 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_p - 9)));

    LassoInstance inst;
    inst.x = random_gaussian(n, p, rng);
    if (rng.next_u64() & 1)
        for (int j = 1; j < p; j += 2) inst.x.col(j) += 0.7 * inst.x.col(j - 1);

    Vector beta = Vector::Zero(p);
    const int k = 1 + static_cast<int>(rng.next_below(std::min(p, 8)));
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(p)));
        beta[j] = (rng.next_u64() & 1 ? 1.0 : -1.0) * (0.5 + 2.5 * rng.next_unit());
    }
    inst.y = inst.x * beta;
    for (Eigen::Index i = 0; i < n; ++i) inst.y[i] += 0.25 * rng.next_gaussian();

    const double lmax = lambda_max(inst.x, inst.y, 1.0);
    inst.lambda = (0.05 + 0.85 * rng.next_unit()) * lmax;
    return inst;
}

// sqrt(n) * Q for a thin QR of a random matrix: (1/n) X'X = I exactly
// (up to rounding), so the lasso has the soft-threshold closed form.
inline Matrix orthonormal_design(int n, int p, Rng& rng) {
    const Matrix base = random_gaussian(n, p, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(base).householderQ() * Matrix::Identity(n, p);
    return std::sqrt(static_cast<double>(n)) * q;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("jsel_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string str() const { return path_.string(); }
    std::filesystem::path path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace jsel::testing
