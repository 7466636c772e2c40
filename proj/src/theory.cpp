#include "jsel/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jsel/jitter.hpp"
#include "jsel/parallel.hpp"
#include "jsel/rng.hpp"

namespace jsel {

namespace {

constexpr double kConditionGuard = 1e12;

void check_active_set(const IndexSet& s, Eigen::Index p, const char* who) {
    if (s.empty()) throw param_error(std::string(who) + ": active set must be nonempty");
    if (static_cast<Eigen::Index>(s.size()) >= p)
        throw param_error(std::string(who) + ": active set must be a proper subset");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= p)
            throw param_error(std::string(who) + ": active index out of range");
        if (i > 0 && s[i] <= s[i - 1])
            throw param_error(std::string(who) + ": active set must be sorted and distinct");
    }
}

struct Partition {
    Matrix ss;    // |S| x |S|
    Matrix sc_s;  // |S^c| x |S|
};

Partition partition_gram(const Matrix& sigma, const IndexSet& s) {
    const Eigen::Index p = sigma.rows();
    const auto k = static_cast<Eigen::Index>(s.size());
    std::vector<char> in_s(static_cast<std::size_t>(p), 0);
    for (int j : s) in_s[static_cast<std::size_t>(j)] = 1;
    IndexSet sc;
    for (int j = 0; j < p; ++j)
        if (!in_s[static_cast<std::size_t>(j)]) sc.push_back(j);

    Partition part;
    part.ss.resize(k, k);
    part.sc_s.resize(p - k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b)
            part.ss(a, b) = sigma(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]);
        for (Eigen::Index r = 0; r < p - k; ++r)
            part.sc_s(r, a) =
                sigma(sc[static_cast<std::size_t>(r)], s[static_cast<std::size_t>(a)]);
    }
    return part;
}

bool well_conditioned(const Matrix& ss) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (ss + ss.transpose()));
    if (eig.info() != Eigen::Success) return false;
    const double lo = eig.eigenvalues().cwiseAbs().minCoeff();
    const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    return lo > 0.0 && hi / lo <= kConditionGuard;
}

}  // namespace

Matrix gram(const Matrix& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 1) throw param_error("gram: need at least one row");
    Matrix sigma = Matrix::Zero(p, p);
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(n));
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();
    return sigma;
}

Matrix centered_gram(const Matrix& x_delta, double delta) {
    if (delta < 0.0) throw param_error("centered_gram: delta must be >= 0");
    Matrix sigma = gram(x_delta);
    sigma.diagonal().array() -= delta * delta;
    return sigma;
}

double matrix_inf_norm(const Matrix& a) {
    if (a.rows() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

GramSummary ic_margin(const Matrix& sigma, const IndexSet& s) {
    if (sigma.rows() != sigma.cols()) throw param_error("ic_margin: sigma must be square");
    check_active_set(s, sigma.rows(), "ic_margin");

    GramSummary summary;
    summary.sigma = sigma;
    summary.active_set = s;

    const Partition part = partition_gram(sigma, s);
    if (!well_conditioned(part.ss)) {
        summary.invertible_SS = false;
        summary.ic_norm = std::numeric_limits<double>::quiet_NaN();
        summary.eta = std::numeric_limits<double>::quiet_NaN();
        return summary;
    }
    summary.invertible_SS = true;
    // Sigma_SS is symmetric, so K = Sigma_{S^c S} Sigma_SS^{-1} solves
    // Sigma_SS K' = Sigma_{S^c S}'.
    Eigen::PartialPivLU<Matrix> lu(part.ss);
    const Matrix kt = lu.solve(part.sc_s.transpose());
    summary.ic_norm = matrix_inf_norm(kt.transpose());
    summary.eta = 1.0 - summary.ic_norm;
    return summary;
}

Lemma1Constants lemma1_delta0(const Matrix& sigma, const IndexSet& s, double c1, double c2,
                              double eta) {
    if (!(eta > 0.0)) throw param_error("lemma1_delta0: eta must be > 0");
    if (!(c1 > 0.0 && c2 > 0.0)) throw param_error("lemma1_delta0: C1, C2 must be > 0");
    check_active_set(s, sigma.rows(), "lemma1_delta0");

    const Partition part = partition_gram(sigma, s);
    if (!well_conditioned(part.ss))
        throw numeric_error("lemma1_delta0: Sigma_SS is numerically singular");

    const double inv_norm = matrix_inf_norm(part.ss.inverse());
    const double cross_norm = matrix_inf_norm(part.sc_s);
    const double c = c1 + c2;

    Lemma1Constants out;
    out.delta1 = 1.0 / (2.0 * c * inv_norm);
    out.a = c * (inv_norm + 2.0 * inv_norm * inv_norm * cross_norm);
    out.b = 2.0 * c * c * inv_norm * inv_norm;
    out.delta0 = std::min({out.delta1, eta / (4.0 * out.a), std::sqrt(eta / (4.0 * out.b))});
    return out;
}

Theorem1Epsilon theorem1_epsilon(int n, int p, double delta, double m_bound, double alpha,
                                 double c_t) {
    if (n < 1 || p < 1) throw param_error("theorem1_epsilon: n, p must be >= 1");
    if (delta < 0.0) throw param_error("theorem1_epsilon: delta must be >= 0");
    if (!(m_bound > 0.0)) throw param_error("theorem1_epsilon: M must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw param_error("theorem1_epsilon: alpha must lie in (0, 1)");
    if (!(c_t > 0.0)) throw param_error("theorem1_epsilon: C_t must be > 0");

    Theorem1Epsilon out;
    out.L = std::log(4.0 * p * static_cast<double>(p) / alpha);
    const double nn = static_cast<double>(n);
    out.t1 = 2.0 * m_bound * std::sqrt(2.0 * delta * delta * out.L / nn);
    out.t2 = c_t * delta * delta * (std::sqrt(out.L / nn) + out.L / nn);
    out.eps = p * (out.t1 + out.t2);
    return out;
}

double design_column_bound(const Matrix& x) {
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        worst = std::max(worst, inv_n * x.col(j).squaredNorm());
    return std::sqrt(worst);
}

Theorem1McReport verify_theorem1_mc(const Matrix& x, const IndexSet& s, double delta, double alpha,
                                    int reps, std::uint64_t seed, double c1, double c2,
                                    double c_t) {
    if (reps < 1) throw param_error("verify_theorem1_mc: reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw param_error("verify_theorem1_mc: alpha must lie in (0, 1)");

    const Matrix sigma = gram(x);
    const GramSummary summary = ic_margin(sigma, s);
    if (!summary.invertible_SS || !(summary.eta > 0.0))
        throw param_error("verify_theorem1_mc: irrepresentability does not hold for gram(X)");

    Theorem1McReport report;
    report.eta = summary.eta;
    report.bound = 1.0 - summary.eta / 2.0;
    report.reps = reps;
    report.c_t = c_t;

    const Lemma1Constants lem = lemma1_delta0(sigma, s, c1, c2, summary.eta);
    report.eps_budget = (c1 + c2) * lem.delta0;
    const Theorem1Epsilon th =
        theorem1_epsilon(static_cast<int>(x.rows()), static_cast<int>(x.cols()), delta,
                         design_column_bound(x), alpha, c_t);
    report.eps = th.eps;

    if (th.eps > report.eps_budget) {
        report.vacuous = true;
        report.pass = true;
        report.reason = "bound vacuous at this delta: eps = " + std::to_string(th.eps) +
                        " exceeds the envelope budget " + std::to_string(report.eps_budget);
        return report;
    }

    std::vector<std::uint8_t> ok(static_cast<std::size_t>(reps), 0);
    parallel_for(reps, [&](std::int64_t r) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(r)));
        Matrix xd(x.rows(), x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                xd(i, j) = x(i, j) + delta * rng.next_gaussian();
        const Matrix tilde = centered_gram(xd, delta);
        const GramSummary pert = ic_margin(tilde, s);
        ok[static_cast<std::size_t>(r)] =
            (pert.invertible_SS && pert.ic_norm <= report.bound) ? 1 : 0;
    });
    int good = 0;
    for (auto v : ok) good += v;

    report.coverage = static_cast<double>(good) / reps;
    report.min_coverage = 1.0 - alpha - 3.0 * std::sqrt(alpha * (1.0 - alpha) / reps);
    report.pass = report.coverage >= report.min_coverage;
    return report;
}

Remark2Report remark2_variance_check(const Vector& beta, double sigma_eps, double delta, int n,
                                     int reps, std::uint64_t seed) {
    if (n < 1 || reps < 1) throw param_error("remark2_variance_check: n, reps must be >= 1");
    const long long total = static_cast<long long>(n) * reps;
    if (total < 10000)
        throw param_error("remark2_variance_check: need at least 1e4 simulated rows");

    // Zero coefficients multiply their noise column by zero, so only the
    // support of beta contributes to W beta.
    std::vector<double> active_beta;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) active_beta.push_back(beta[j]);

    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (long long i = 0; i < total; ++i) {
        double v = sigma_eps * rng.next_gaussian();
        for (double bj : active_beta) v -= delta * rng.next_gaussian() * bj;
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(total);
    const double var = (sum_sq - static_cast<double>(total) * mean * mean) /
                       static_cast<double>(total - 1);

    Remark2Report report;
    report.sample_var = var;
    report.expected = sigma_eps * sigma_eps + delta * delta * beta.squaredNorm();
    report.rel_err = report.expected > 0.0
                         ? std::abs(var - report.expected) / report.expected
                         : std::abs(var);
    report.n_samples = static_cast<int>(total);
    report.pass = report.rel_err <= 0.03;
    return report;
}

namespace {

double perturbed_ic_norm(const Matrix& sigma, const Matrix& delta_mat, const IndexSet& s,
                         bool* invertible) {
    const GramSummary pert = ic_margin(sigma + delta_mat, s);
    *invertible = pert.invertible_SS;
    return pert.invertible_SS ? pert.ic_norm : std::numeric_limits<double>::infinity();
}

}  // namespace

Lemma1SearchReport lemma1_falsification_search(const Matrix& sigma, const IndexSet& s, double c1,
                                               double c2, int n_random, int refine_steps,
                                               std::uint64_t seed) {
    if (n_random < 1) throw param_error("lemma1_falsification_search: n_random must be >= 1");
    const GramSummary summary = ic_margin(sigma, s);
    if (!summary.invertible_SS || !(summary.eta > 0.0))
        throw param_error("lemma1_falsification_search: irrepresentability does not hold");
    const Lemma1Constants lem = lemma1_delta0(sigma, s, c1, c2, summary.eta);

    Lemma1SearchReport report;
    report.budget = (c1 + c2) * lem.delta0;
    report.bound = 1.0 - summary.eta / 2.0;

    const Eigen::Index p = sigma.rows();
    Rng rng(seed);

    auto record = [&](double norm, bool invertible) {
        ++report.n_probes;
        if (!invertible) {
            ++report.singular;
            return;
        }
        if (norm > report.worst_ic_norm) report.worst_ic_norm = norm;
        if (norm > report.bound) ++report.violations;
    };

    constexpr int kRefineCandidates = 20;
    std::vector<std::pair<double, Matrix>> best;  // ascending by ic norm

    for (int trial = 0; trial < n_random; ++trial) {
        Matrix delta_mat = Matrix::Zero(p, p);
        if (trial % 2 == 0) {
            // Dense sign pattern: every row sits exactly on the budget.
            const double cell = report.budget / static_cast<double>(p);
            for (Eigen::Index i = 0; i < p; ++i)
                for (Eigen::Index j = 0; j < p; ++j)
                    delta_mat(i, j) = (rng.next_u64() & 1) ? cell : -cell;
        } else {
            // Concentrated rows: the extreme points of the row-wise l1 ball.
            for (Eigen::Index i = 0; i < p; ++i) {
                const auto j = static_cast<Eigen::Index>(
                    rng.next_below(static_cast<std::uint64_t>(p)));
                delta_mat(i, j) = (rng.next_u64() & 1) ? report.budget : -report.budget;
            }
        }
        bool invertible = false;
        const double norm = perturbed_ic_norm(sigma, delta_mat, s, &invertible);
        record(norm, invertible);
        if (invertible) {
            if (best.size() < kRefineCandidates) {
                best.emplace_back(norm, delta_mat);
                std::sort(best.begin(), best.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
            } else if (norm > best.front().first) {
                best.front() = {norm, delta_mat};
                std::sort(best.begin(), best.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
            }
        }
    }

    // Coordinate ascent on the strongest candidates: move row mass between
    // two entries, which never grows the row's l1 norm past the budget.
    for (auto& [score, delta_mat] : best) {
        double current = score;
        for (int step = 0; step < refine_steps; ++step) {
            const auto i = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(p)));
            const auto k1 =
                static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(p)));
            auto k2 = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(p)));
            if (k1 == k2) k2 = (k2 + 1) % p;
            const double amount = rng.next_unit() * std::abs(delta_mat(i, k1));
            if (amount == 0.0) continue;
            Matrix proposal = delta_mat;
            proposal(i, k1) -= (proposal(i, k1) > 0.0 ? amount : -amount);
            proposal(i, k2) += (rng.next_u64() & 1) ? amount : -amount;
            bool invertible = false;
            const double norm = perturbed_ic_norm(sigma, proposal, s, &invertible);
            record(norm, invertible);
            if (invertible && norm > current) {
                current = norm;
                delta_mat = proposal;
            }
        }
    }

    report.pass = report.violations == 0 && report.singular == 0;
    return report;
}

int binomial_upper_critical(int n, double p, double level) {
    // Smallest c with P(Bin(n, p) > c) <= level.
    double log_pmf = n * std::log1p(-p);  // pmf at k = 0
    double cdf = std::exp(log_pmf);
    if (1.0 - cdf <= level) return 0;
    for (int k = 1; k <= n; ++k) {
        log_pmf += std::log(static_cast<double>(n - k + 1) / k) + std::log(p) - std::log1p(-p);
        cdf += std::exp(log_pmf);
        if (1.0 - cdf <= level) return k;
    }
    return n;
}

Theorem2CoverageReport theorem2_coverage_check(int m, int p, int B, double alpha, int n_reps,
                                               std::uint64_t seed) {
    if (n_reps < 1) throw param_error("theorem2_coverage_check: n_reps must be >= 1");
    Theorem2CoverageReport report;
    report.eps = theorem2_epsilon(m, p, B, alpha);
    report.n_reps = n_reps;

    // Fixed cell means, shared across repetitions.
    const std::size_t n_cells = static_cast<std::size_t>(m) * p;
    std::vector<double> means(n_cells);
    {
        Rng rng(child_seed(seed, 0));
        for (auto& f : means) f = rng.next_unit();
    }

    std::vector<std::uint8_t> exceeded(static_cast<std::size_t>(n_reps), 0);
    parallel_for(n_reps, [&](std::int64_t r) {
        Rng rng(child_seed(seed, {1, static_cast<std::uint64_t>(r)}));
        for (std::size_t cell = 0; cell < n_cells; ++cell) {
            int hits = 0;
            for (int b = 0; b < B; ++b)
                if (rng.next_unit() < means[cell]) ++hits;
            const double dev = std::abs(static_cast<double>(hits) / B - means[cell]);
            if (dev > report.eps) {
                exceeded[static_cast<std::size_t>(r)] = 1;
                break;
            }
        }
    });
    for (auto v : exceeded) report.exceed_count += v;

    report.critical_count = binomial_upper_critical(n_reps, alpha, 0.01);
    report.pass = report.exceed_count <= report.critical_count;
    return report;
}

}  // namespace jsel
