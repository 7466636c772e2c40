#pragma once

#include <cstdint>

#include "jsel/common.hpp"

namespace jsel {

// Block-structured correlation: unit diagonal, rho_rel between pairs of
// active features, rho_irr between pairs of inactive ones, rho_mix across.
struct CovarianceSpec {
    int p = 0;
    IndexSet active_set;  // 0-based, sorted
    double rho_rel = 0.0;
    double rho_irr = 0.0;
    double rho_mix = 0.0;
};

void validate(const CovarianceSpec& spec);

Matrix build_block_covariance(const CovarianceSpec& spec);

// Symmetric eigendecomposition, eigenvalues clipped at pd_floor, then
// re-symmetrized. Returns the input unchanged when it already clears the
// floor. The diagonal can drift away from 1; see rescale_to_correlation.
Matrix nearest_pd(const Matrix& m, double pd_floor = 1e-8);

// D^{-1/2} M D^{-1/2} with D = diag(M); restores unit diagonal after a PD
// projection so the rho parameters stay interpretable.
Matrix rescale_to_correlation(const Matrix& m);

struct DesignMatrix {
    Matrix values;      // n x p
    Vector col_means;   // empty until standardize() records them
    Vector col_scales;
    bool standardized = false;
};

// Lower Cholesky factor of sigma; throws numeric_error when not PD.
Matrix mvn_factor(const Matrix& sigma);

// Rows i.i.d. N(0, sigma) from one splitmix64 stream: per row, p standard
// normals are drawn in column order and mapped through the factor.
DesignMatrix sample_mvn(int n, const Matrix& sigma, std::uint64_t seed);
DesignMatrix sample_mvn_factor(int n, const Matrix& chol_lower, std::uint64_t seed);

// Center and scale each column to sample SD 1 (n-1 divisor). The original
// moments are kept in col_means/col_scales.
DesignMatrix standardize(const DesignMatrix& x);

// The kernel behind standardize(): in-place column center/scale with the
// n-1 divisor. Every standardization in the project goes through this one
// routine so results are bit-identical across call sites.
void standardize_columns_inplace(Matrix& m, Vector* means = nullptr, Vector* scales = nullptr);

struct GroundTruth {
    Vector beta;
    IndexSet active_set;  // support of beta, 0-based sorted
    double sigma_eps = 1.0;
};

GroundTruth make_ground_truth(int p, const IndexSet& active_set,
                              const std::vector<double>& coefficients, double sigma_eps);
void validate(const GroundTruth& truth);

// y = X0 beta + eps, eps i.i.d. N(0, sigma_eps^2).
Vector generate_response(const DesignMatrix& x0, const GroundTruth& truth, std::uint64_t seed);

// Entrywise X0 + N(0, delta_obs^2), filled in column-major order.
// delta_obs = 0 returns the input bit-identically.
DesignMatrix add_observation_noise(const DesignMatrix& x0, double delta_obs, std::uint64_t seed);

}  // namespace jsel
