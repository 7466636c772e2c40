#pragma once

#include <cstdint>
#include <string>

#include "jsel/common.hpp"

namespace jsel {

// (1/n) X'X, stored exactly symmetric.
Matrix gram(const Matrix& x);

// (1/n) X_delta' X_delta - delta^2 I: unbiased for the noise-free Gram,
// symmetric, not necessarily positive semi-definite.
Matrix centered_gram(const Matrix& x_delta, double delta);

// Induced l_inf norm: maximum absolute row sum.
double matrix_inf_norm(const Matrix& a);

// ||Sigma_{S^c S} Sigma_{SS}^{-1}||_inf and the margin eta = 1 - that norm.
// Sigma_SS is treated as singular when its eigenvalue condition number
// exceeds 1e12; ic_norm and eta are NaN in that case.
struct GramSummary {
    Matrix sigma;
    IndexSet active_set;
    double ic_norm = 0.0;
    double eta = 0.0;
    bool invertible_SS = false;
};

GramSummary ic_margin(const Matrix& sigma, const IndexSet& s);

// Perturbation-robustness envelope for the irrepresentability margin:
//   delta1 = 1 / (2 (C1+C2) ||Sigma_SS^{-1}||_inf)
//   a      = (C1+C2) (||Sigma_SS^{-1}||_inf + 2 ||Sigma_SS^{-1}||_inf^2 ||Sigma_{S^c S}||_inf)
//   b      = 2 (C1+C2)^2 ||Sigma_SS^{-1}||_inf^2
//   delta0 = min{ delta1, eta/(4a), sqrt(eta/(4b)) }
// For every perturbation with ||Delta||_inf <= (C1+C2) delta0 the perturbed
// norm stays at or below 1 - eta/2.
struct Lemma1Constants {
    double delta1 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double delta0 = 0.0;
};

Lemma1Constants lemma1_delta0(const Matrix& sigma, const IndexSet& s, double c1, double c2,
                              double eta);

// High-probability deviation budget for the centered Gram under N(0, delta^2)
// design noise:
//   L = log(4 p^2 / alpha), t1 = 2 M sqrt(2 delta^2 L / n),
//   t2 = C_t delta^2 (sqrt(L/n) + L/n), eps = p (t1 + t2).
// C_t is a free absorbing constant (default 4 at the call sites); every
// report prints the value used.
struct Theorem1Epsilon {
    double L = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double eps = 0.0;
};

Theorem1Epsilon theorem1_epsilon(int n, int p, double delta, double m_bound, double alpha,
                                 double c_t);

// Default M: max_j sqrt((1/n) sum_i X_ij^2). Equals sqrt((n-1)/n) for
// designs standardized with the n-1 divisor.
double design_column_bound(const Matrix& x);

// Monte Carlo check that the centered-Gram irrepresentability norm stays at
// or below 1 - eta/2 with the advertised probability. The noise level is
// admissible only when eps fits inside the lemma envelope translated to a
// ||Delta||_inf budget of (C1+C2) delta0; otherwise the bound is vacuous at
// this delta and the check is skipped with a reason rather than failed.
struct Theorem1McReport {
    bool vacuous = false;
    std::string reason;
    double eta = 0.0;
    double eps = 0.0;
    double eps_budget = 0.0;
    double bound = 0.0;  // 1 - eta/2
    double coverage = 0.0;
    double min_coverage = 0.0;  // 1 - alpha - 3 sqrt(alpha (1-alpha) / reps)
    int reps = 0;
    double c_t = 0.0;
    bool pass = false;
};

Theorem1McReport verify_theorem1_mc(const Matrix& x, const IndexSet& s, double delta, double alpha,
                                    int reps, std::uint64_t seed, double c1 = 1.0, double c2 = 1.0,
                                    double c_t = 4.0);

// Simulates eps_tilde = eps - W beta and compares the sample variance with
// sigma^2 + delta^2 ||beta||_2^2 (3% relative tolerance).
struct Remark2Report {
    double sample_var = 0.0;
    double expected = 0.0;
    double rel_err = 0.0;
    int n_samples = 0;
    bool pass = false;
};

Remark2Report remark2_variance_check(const Vector& beta, double sigma_eps, double delta, int n,
                                     int reps, std::uint64_t seed);

// Adversarial probe of the lemma envelope at delta = delta0: random
// sign-pattern perturbations with row sums on the budget boundary, the best
// candidates refined by coordinate ascent. Counts violations of
// ic_norm <= 1 - eta/2 (none should exist).
struct Lemma1SearchReport {
    int n_probes = 0;
    double budget = 0.0;
    double bound = 0.0;  // 1 - eta/2
    double worst_ic_norm = 0.0;
    int violations = 0;
    int singular = 0;  // perturbed Sigma_SS that lost invertibility
    bool pass = false;
};

Lemma1SearchReport lemma1_falsification_search(const Matrix& sigma, const IndexSet& s, double c1,
                                               double c2, int n_random, int refine_steps,
                                               std::uint64_t seed);

// Hoeffding-budget coverage on a synthetic Bernoulli frequency model: cell
// means are fixed uniforms, each repetition samples B draws per cell and
// tests whether the sup deviation exceeds theorem2_epsilon(m, p, B, alpha).
// Passes when the exceedance count stays below the 1%-level binomial
// critical value for rate alpha.
struct Theorem2CoverageReport {
    double eps = 0.0;
    int n_reps = 0;
    int exceed_count = 0;
    int critical_count = 0;
    bool pass = false;
};

Theorem2CoverageReport theorem2_coverage_check(int m, int p, int B, double alpha, int n_reps,
                                               std::uint64_t seed);

// Smallest c with P(Bin(n, p) > c) <= level; the acceptance threshold for
// the binomial exceedance tests above.
int binomial_upper_critical(int n, double p, double level);

}  // namespace jsel
