#include "jsel/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "jsel/rng.hpp"

namespace jsel {

namespace {

void check_correlation(double rho, const char* name) {
    if (!(rho > -1.0 && rho < 1.0))
        throw param_error(std::string(name) + " must lie in (-1, 1), got " + std::to_string(rho));
}

void check_symmetric(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) throw param_error(std::string(who) + ": matrix must be square");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw param_error(std::string(who) + ": matrix is not symmetric (max |M - M^T| = " +
                          std::to_string(asym) + ")");
}

void fill_gaussian(Matrix& w, double scale, Rng& rng) {
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = scale * rng.next_gaussian();
}

}  // namespace

void validate(const CovarianceSpec& spec) {
    if (spec.p < 1) throw param_error("CovarianceSpec: p must be >= 1");
    check_correlation(spec.rho_rel, "rho_rel");
    check_correlation(spec.rho_irr, "rho_irr");
    check_correlation(spec.rho_mix, "rho_mix");
    IndexSet s = spec.active_set;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
        throw param_error("CovarianceSpec: active_set has duplicate indices");
    if (!s.empty() && (s.front() < 0 || s.back() >= spec.p))
        throw param_error("CovarianceSpec: active_set indices out of range");
    if (s != spec.active_set)
        throw param_error("CovarianceSpec: active_set must be sorted ascending");
}

Matrix build_block_covariance(const CovarianceSpec& spec) {
    validate(spec);
    const int p = spec.p;
    std::vector<char> in_s(static_cast<std::size_t>(p), 0);
    for (int j : spec.active_set) in_s[static_cast<std::size_t>(j)] = 1;

    Matrix m(p, p);
    for (int j = 0; j < p; ++j) {
        for (int k = 0; k < p; ++k) {
            if (j == k)
                m(j, k) = 1.0;
            else if (in_s[j] && in_s[k])
                m(j, k) = spec.rho_rel;
            else if (!in_s[j] && !in_s[k])
                m(j, k) = spec.rho_irr;
            else
                m(j, k) = spec.rho_mix;
        }
    }
    return m;
}

Matrix nearest_pd(const Matrix& m, double pd_floor) {
    if (!(pd_floor > 0.0)) throw param_error("nearest_pd: pd_floor must be positive");
    check_symmetric(m, "nearest_pd");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) throw numeric_error("nearest_pd: eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() >= pd_floor) return m;

    Vector clipped = eig.eigenvalues().cwiseMax(pd_floor);
    Matrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    out = 0.5 * (out + out.transpose()).eval();
    return out;
}

Matrix rescale_to_correlation(const Matrix& m) {
    check_symmetric(m, "rescale_to_correlation");
    if (m.diagonal().minCoeff() <= 0.0)
        throw numeric_error("rescale_to_correlation: non-positive diagonal entry");
    Vector d = m.diagonal().cwiseSqrt().cwiseInverse();
    return d.asDiagonal() * m * d.asDiagonal();
}

Matrix mvn_factor(const Matrix& sigma) {
    check_symmetric(sigma, "mvn_factor");
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw numeric_error("mvn_factor: Cholesky failed, covariance is not positive definite");
    return llt.matrixL();
}

DesignMatrix sample_mvn_factor(int n, const Matrix& chol_lower, std::uint64_t seed) {
    if (n < 0) throw param_error("sample_mvn: n must be >= 0");
    const Eigen::Index p = chol_lower.rows();
    DesignMatrix x;
    x.values.resize(n, p);
    Rng rng(seed);
    Vector z(p);
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.next_gaussian();
        x.values.row(i) = (chol_lower.triangularView<Eigen::Lower>() * z).transpose();
    }
    return x;
}

DesignMatrix sample_mvn(int n, const Matrix& sigma, std::uint64_t seed) {
    return sample_mvn_factor(n, mvn_factor(sigma), seed);
}

void standardize_columns_inplace(Matrix& m, Vector* means, Vector* scales) {
    const Eigen::Index n = m.rows();
    const Eigen::Index p = m.cols();
    if (n < 2) throw param_error("standardize: need at least 2 rows");
    if (means) means->resize(p);
    if (scales) scales->resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = m.col(j).mean();
        m.col(j).array() -= mean;
        const double sd = std::sqrt(m.col(j).squaredNorm() / static_cast<double>(n - 1));
        if (sd == 0.0)
            throw data_error("standardize: column " + std::to_string(j + 1) +
                             " is constant and cannot be scaled");
        m.col(j) /= sd;
        if (means) (*means)[j] = mean;
        if (scales) (*scales)[j] = sd;
    }
}

DesignMatrix standardize(const DesignMatrix& x) {
    DesignMatrix out;
    out.values = x.values;
    standardize_columns_inplace(out.values, &out.col_means, &out.col_scales);
    out.standardized = true;
    return out;
}

GroundTruth make_ground_truth(int p, const IndexSet& active_set,
                              const std::vector<double>& coefficients, double sigma_eps) {
    if (active_set.size() != coefficients.size())
        throw param_error("ground truth: active_set and coefficients differ in length");
    GroundTruth truth;
    truth.beta = Vector::Zero(p);
    truth.active_set = active_set;
    truth.sigma_eps = sigma_eps;
    for (std::size_t i = 0; i < active_set.size(); ++i) {
        const int j = active_set[i];
        if (j < 0 || j >= p) throw param_error("ground truth: active index out of range");
        truth.beta[j] = coefficients[i];
    }
    validate(truth);
    return truth;
}

void validate(const GroundTruth& truth) {
    if (truth.sigma_eps < 0.0) throw param_error("ground truth: sigma_eps must be >= 0");
    IndexSet support;
    for (Eigen::Index j = 0; j < truth.beta.size(); ++j)
        if (truth.beta[j] != 0.0) support.push_back(static_cast<int>(j));
    if (support != truth.active_set)
        throw param_error("ground truth: beta must be nonzero exactly on active_set");
}

Vector generate_response(const DesignMatrix& x0, const GroundTruth& truth, std::uint64_t seed) {
    if (x0.values.cols() != truth.beta.size())
        throw param_error("generate_response: design and beta dimensions disagree");
    Vector y = x0.values * truth.beta;
    if (truth.sigma_eps > 0.0) {
        Rng rng(seed);
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y[i] += truth.sigma_eps * rng.next_gaussian();
    }
    return y;
}

DesignMatrix add_observation_noise(const DesignMatrix& x0, double delta_obs, std::uint64_t seed) {
    if (delta_obs < 0.0) throw param_error("add_observation_noise: delta_obs must be >= 0");
    if (delta_obs == 0.0) return x0;
    DesignMatrix out;
    out.values.resize(x0.values.rows(), x0.values.cols());
    Rng rng(seed);
    fill_gaussian(out.values, delta_obs, rng);
    out.values += x0.values;
    out.col_means = x0.col_means;
    out.col_scales = x0.col_scales;
    out.standardized = false;
    return out;
}

}  // namespace jsel
