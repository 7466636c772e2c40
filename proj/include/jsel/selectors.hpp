#pragma once

#include <cstdint>

#include "jsel/common.hpp"

namespace jsel {

enum class SelectorKind { lasso, enet };

// Fixed-tuning penalized least squares:
//   (1/2n)||y - X b||_2^2 + lambda * (alpha ||b||_1 + (1-alpha)/2 ||b||_2^2)
// alpha = 1 is the lasso. No intercept; y enters the solver as given.
struct SelectorSpec {
    SelectorKind kind = SelectorKind::lasso;
    double lambda = 0.0;
    double alpha = 1.0;
    int max_iter = 100000;  // sweep budget
    double tol = 1e-7;      // max coordinate change per full sweep
    double zero_tol = 0.0;  // support extraction threshold
};

void validate(const SelectorSpec& spec);

struct CoefficientVector {
    Vector beta;
    int n_iter = 0;  // sweeps used (full + active-set)
    bool converged = false;
    double objective = 0.0;
};

inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

// Cyclic coordinate descent with a maintained residual and active-set
// polishing between full sweeps. Cold start, fixed coordinate order;
// a pure function of (X, y, spec).
CoefficientVector fit(const Matrix& x, const Vector& y, const SelectorSpec& spec);

// {j : |beta_j| > zero_tol}. Coordinate descent produces exact zeros, so the
// default zero_tol = 0 gives the exact support.
IndexSet support(const CoefficientVector& coef, double zero_tol = 0.0);

double objective_value(const Matrix& x, const Vector& y, const Vector& beta,
                       const SelectorSpec& spec);

// Max stationarity violation at beta: for nonzero coordinates the absolute
// subgradient residual, for zero coordinates the excess of |(1/n)x_j'r|
// over the l1 threshold.
double kkt_residual(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                    double alpha);

// sqrt(log(p)/n), natural log.
double default_lambda(int n, int p);

// Smallest lambda that zeroes every coordinate: max_j |(1/n) x_j'y| / alpha.
double lambda_max(const Matrix& x, const Vector& y, double alpha);

// K-fold cross validation over a 100-point geometric grid from lambda_max
// down to 1e-3 lambda_max; cv_lambda_1se returns the largest lambda whose
// mean CV MSE is within one standard error of the minimum. y is used as
// given (not standardized). Folds come from a seeded shuffle, contiguous
// blocks; fold_of_row records the assignment for auditability.
struct CvCurve {
    std::vector<double> grid;   // descending
    Matrix fold_mse;            // folds x grid
    Vector mean_mse;
    std::vector<int> fold_of_row;
    int min_index = 0;
    double se_at_min = 0.0;
    int chosen_index = 0;
};

CvCurve cv_curve(const Matrix& x, const Vector& y, double alpha, int folds, std::uint64_t seed);
double cv_lambda_1se(const Matrix& x, const Vector& y, double alpha, int folds,
                     std::uint64_t seed);

}  // namespace jsel
