#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jsel/datagen.hpp"

using namespace jsel;

TEST_SUITE_BEGIN("unit");

TEST_CASE("block covariance formula") {
    CovarianceSpec spec{3, {0}, 0.5, 0.1, 0.2};
    const Matrix m = build_block_covariance(spec);
    Matrix expected(3, 3);
    expected << 1, 0.2, 0.2, 0.2, 1, 0.1, 0.2, 0.1, 1;
    CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);

    CovarianceSpec empty{2, {}, 0.5, 0.0, 0.2};
    CHECK(build_block_covariance(empty).isIdentity(0.0));

    CovarianceSpec bad{3, {0}, 1.5, 0.1, 0.2};
    CHECK_THROWS_AS(build_block_covariance(bad), param_error);
    CHECK_THROWS_AS(build_block_covariance(CovarianceSpec{3, {0, 0}, 0.5, 0.1, 0.2}), param_error);
    CHECK_THROWS_AS(build_block_covariance(CovarianceSpec{3, {5}, 0.5, 0.1, 0.2}), param_error);
}

TEST_CASE("block covariance at campaign scale") {
    CovarianceSpec spec{1000, {199, 399, 599, 799, 999}, 0.5, 0.05, 0.4};
    const Matrix m = build_block_covariance(spec);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.diagonal().isOnes(0.0));
    int rel_pairs = 0;
    for (Eigen::Index j = 0; j < 1000; ++j)
        for (Eigen::Index k = j + 1; k < 1000; ++k)
            if (m(j, k) == 0.5) ++rel_pairs;
    CHECK(rel_pairs == 10);  // C(5, 2) active pairs
}

TEST_CASE("nearest_pd clips eigenvalues and is a fixed point on PD input") {
    Matrix pd(2, 2);
    pd << 1.0, 0.3, 0.3, 1.0;  // eigenvalues 0.7 and 1.3
    CHECK(nearest_pd(pd, 1e-8) == pd);
    CHECK(nearest_pd(Matrix::Identity(4, 4), 1e-8).isIdentity(0.0));

    Matrix singular(2, 2);
    singular << 1, 1, 1, 1;
    const Matrix fixed = nearest_pd(singular, 1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(fixed);
    CHECK(eig.eigenvalues().minCoeff() >= 1e-8 * (1 - 1e-12));

    // Brute-force oracle: clip the eigenvalues directly and reconstruct.
    Eigen::SelfAdjointEigenSolver<Matrix> base(singular);
    const Matrix oracle = base.eigenvectors() *
                          base.eigenvalues().cwiseMax(1e-8).asDiagonal() *
                          base.eigenvectors().transpose();
    CHECK((fixed - oracle).cwiseAbs().maxCoeff() < 1e-12);

    Matrix asym(2, 2);
    asym << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(nearest_pd(asym, 1e-8), param_error);
}

TEST_CASE("nearest_pd is idempotent") {
    Rng rng(123);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a = testing::random_gaussian(6, 6, rng);
        a = 0.5 * (a + a.transpose()).eval();
        const Matrix once = nearest_pd(a, 1e-8);
        const Matrix twice = nearest_pd(once, 1e-8);
        CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("rescale_to_correlation restores the unit diagonal") {
    Matrix m(2, 2);
    m << 4.0, 1.0, 1.0, 0.25;
    const Matrix c = rescale_to_correlation(m);
    CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c(0, 1) == doctest::Approx(1.0).epsilon(1e-12));  // 1 / (2 * 0.5)
}

TEST_CASE("sample_mvn matches the target covariance and respects seeds") {
    const Matrix sigma = Matrix::Identity(2, 2);
    const DesignMatrix x = sample_mvn(100000, sigma, 5);
    const Matrix cov = (x.values.transpose() * x.values) / 100000.0;
    CHECK((cov - sigma).cwiseAbs().maxCoeff() < 0.05);

    CHECK(sample_mvn(0, sigma, 5).values.rows() == 0);
    const DesignMatrix again = sample_mvn(100000, sigma, 5);
    CHECK(x.values == again.values);

    Matrix not_pd(2, 2);
    not_pd << 1, 2, 2, 1;
    CHECK_THROWS_AS(sample_mvn(10, not_pd, 5), numeric_error);
}

TEST_CASE("sample_mvn honors correlations") {
    Matrix sigma(2, 2);
    sigma << 1.0, 0.6, 0.6, 1.0;
    const DesignMatrix x = sample_mvn(50000, sigma, 17);
    const double corr = (x.values.col(0).dot(x.values.col(1))) / 50000.0;
    CHECK(corr == doctest::Approx(0.6).epsilon(0.05));
}

TEST_CASE("standardize centers and scales with the n-1 divisor") {
    DesignMatrix x;
    x.values.resize(3, 1);
    x.values << 1, 2, 3;
    const DesignMatrix s = standardize(x);
    CHECK(s.values(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.values(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.values(2, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.col_means[0] == doctest::Approx(2.0));
    CHECK(s.col_scales[0] == doctest::Approx(1.0));
    CHECK(s.standardized);

    const DesignMatrix s2 = standardize(s);
    CHECK((s2.values - s.values).cwiseAbs().maxCoeff() < 1e-12);

    DesignMatrix constant;
    constant.values.resize(3, 2);
    constant.values << 1, 7, 2, 7, 3, 7;
    CHECK_THROWS_WITH_AS(standardize(constant), doctest::Contains("column 2"), data_error);

    DesignMatrix tiny;
    tiny.values.resize(1, 1);
    tiny.values << 1;
    CHECK_THROWS_AS(standardize(tiny), param_error);
}

TEST_CASE("generate_response obeys the noise model") {
    const GroundTruth zero = make_ground_truth(3, {}, {}, 0.0);
    DesignMatrix x;
    x.values = Matrix::Ones(4, 3);
    CHECK(generate_response(x, zero, 1).isZero(0.0));

    const GroundTruth noiseless = make_ground_truth(3, {1}, {2.0}, 0.0);
    const Vector y = generate_response(x, noiseless, 1);
    CHECK((y - x.values * noiseless.beta).cwiseAbs().maxCoeff() == 0.0);

    DesignMatrix big;
    big.values = Matrix::Zero(100000, 1);
    const GroundTruth noisy = make_ground_truth(1, {}, {}, 1.0);
    const Vector eps = generate_response(big, noisy, 4);
    const double var = (eps.array() - eps.mean()).square().sum() / (eps.size() - 1);
    CHECK(var > 0.97);
    CHECK(var < 1.03);

    DesignMatrix wrong;
    wrong.values = Matrix::Ones(4, 2);
    CHECK_THROWS_AS(generate_response(wrong, noiseless, 1), param_error);
}

TEST_CASE("ground truth validation") {
    CHECK_THROWS_AS(make_ground_truth(3, {0}, {1.0, 2.0}, 1.0), param_error);
    CHECK_THROWS_AS(make_ground_truth(3, {0}, {0.0}, 1.0), param_error);  // zero on support
    CHECK_THROWS_AS(make_ground_truth(3, {5}, {1.0}, 1.0), param_error);
}

TEST_CASE("observation noise moments, identity, and determinism") {
    DesignMatrix x;
    x.values = Matrix::Zero(1000, 1000);
    const DesignMatrix same = add_observation_noise(x, 0.0, 9);
    CHECK(same.values == x.values);

    const DesignMatrix noisy = add_observation_noise(x, 2.0, 9);
    const double var = noisy.values.array().square().sum() / (1e6 - 1);
    CHECK(var > 3.96);
    CHECK(var < 4.04);

    const DesignMatrix again = add_observation_noise(x, 2.0, 9);
    CHECK(noisy.values == again.values);
    CHECK_FALSE(noisy.standardized);
    CHECK_THROWS_AS(add_observation_noise(x, -0.1, 9), param_error);
}

TEST_CASE("full generation pipeline is reproducible from one seed") {
    CovarianceSpec cov{20, {2, 7}, 0.5, 0.05, 0.2};
    const Matrix sigma = rescale_to_correlation(nearest_pd(build_block_covariance(cov), 1e-8));
    const GroundTruth truth = make_ground_truth(20, {2, 7}, {3.0, 1.5}, 1.0);

    auto run = [&](std::uint64_t seed) {
        const DesignMatrix x0 = standardize(sample_mvn(30, sigma, child_seed(seed, 0)));
        const Vector y = generate_response(x0, truth, child_seed(seed, 1));
        const DesignMatrix x = add_observation_noise(x0, 0.5, child_seed(seed, 2));
        return std::pair{x.values, y};
    };
    const auto [x1, y1] = run(77);
    const auto [x2, y2] = run(77);
    CHECK(x1 == x2);
    CHECK(y1 == y2);
    const auto [x3, y3] = run(78);
    CHECK(x1 != x3);
}

TEST_SUITE_END();
