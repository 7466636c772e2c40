#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jsel/selectors.hpp"

using namespace jsel;
using jsel::testing::orthonormal_design;
using jsel::testing::prox_gradient_lasso;
using jsel::testing::random_gaussian;
using jsel::testing::random_lasso_instance;

namespace {

SelectorSpec lasso_spec(double lambda) {
    SelectorSpec spec;
    spec.lambda = lambda;
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(1.25, 0.0) == 1.25);
}

TEST_CASE("default lambda") {
    CHECK(default_lambda(100, 1000) == doctest::Approx(0.26283).epsilon(4e-5));
    CHECK(default_lambda(400, 1000) < default_lambda(100, 1000));
    CHECK(default_lambda(100, 1000) < default_lambda(100, 2000));
    CHECK_THROWS_AS(default_lambda(0, 10), param_error);
    CHECK_THROWS_AS(default_lambda(10, 1), param_error);
}

TEST_CASE("orthonormal design has the soft-threshold closed form") {
    Rng rng(21);
    const int n = 60, p = 20;
    const Matrix x = orthonormal_design(n, p, rng);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.next_gaussian();

    const double lambda = 0.15;
    const CoefficientVector coef = fit(x, y, lasso_spec(lambda));
    REQUIRE(coef.converged);
    for (int j = 0; j < p; ++j) {
        const double z = x.col(j).dot(y) / n;
        CHECK(coef.beta[j] == doctest::Approx(soft_threshold(z, lambda)).epsilon(1e-8));
    }

    // Elastic net closed form on the same design.
    SelectorSpec enet;
    enet.kind = SelectorKind::enet;
    enet.lambda = lambda;
    enet.alpha = 0.5;
    const CoefficientVector ecoef = fit(x, y, enet);
    for (int j = 0; j < p; ++j) {
        const double z = x.col(j).dot(y) / n;
        const double expected = soft_threshold(z, lambda * 0.5) / (1.0 + lambda * 0.5);
        CHECK(ecoef.beta[j] == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("full shrinkage at lambda_max") {
    Rng rng(22);
    const Matrix x = random_gaussian(30, 40, rng);
    Vector y(30);
    for (int i = 0; i < 30; ++i) y[i] = rng.next_gaussian();
    const double lmax = lambda_max(x, y, 1.0);
    const CoefficientVector coef = fit(x, y, lasso_spec(lmax * 1.000001));
    CHECK(coef.beta.isZero(0.0));
    CHECK(coef.converged);
    CHECK(support(coef).empty());
}

TEST_CASE("coordinate descent matches the prox-gradient oracle") {
    Rng rng(23);
    const Matrix x = random_gaussian(20, 50, rng);
    Vector beta_true = Vector::Zero(50);
    beta_true[3] = 2.0;
    beta_true[17] = -1.0;
    Vector y = x * beta_true;
    for (int i = 0; i < 20; ++i) y[i] += 0.3 * rng.next_gaussian();

    const double lambda = 0.4 * lambda_max(x, y, 1.0);
    const CoefficientVector coef = fit(x, y, lasso_spec(lambda));
    REQUIRE(coef.converged);
    const Vector oracle = prox_gradient_lasso(x, y, lambda, 1e-10);
    CHECK((coef.beta - oracle).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(kkt_residual(x, y, coef.beta, lambda, 1.0) < 1e-6);
}

TEST_CASE("fit is pure and enet at alpha 1 equals the lasso bitwise") {
    Rng rng(24);
    const auto inst = random_lasso_instance(rng);
    const CoefficientVector a = fit(inst.x, inst.y, lasso_spec(inst.lambda));
    const CoefficientVector b = fit(inst.x, inst.y, lasso_spec(inst.lambda));
    CHECK(a.beta == b.beta);
    CHECK(a.n_iter == b.n_iter);

    SelectorSpec enet1;
    enet1.kind = SelectorKind::enet;
    enet1.lambda = inst.lambda;
    enet1.alpha = 1.0;
    const CoefficientVector c = fit(inst.x, inst.y, enet1);
    CHECK(a.beta == c.beta);
}

TEST_CASE("kkt certificate holds on converged runs") {
    Rng rng(25);
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = random_lasso_instance(rng);
        const CoefficientVector coef = fit(inst.x, inst.y, lasso_spec(inst.lambda));
        REQUIRE(coef.converged);
        CHECK(kkt_residual(inst.x, inst.y, coef.beta, inst.lambda, 1.0) < 1e-6);
        CHECK(std::isfinite(coef.objective));
        CHECK(coef.objective <=
              objective_value(inst.x, inst.y, Vector::Zero(inst.x.cols()), lasso_spec(inst.lambda)));
    }
}

TEST_CASE("support extraction") {
    CoefficientVector coef;
    coef.beta.resize(3);
    coef.beta << 0.0, 1e-12, 0.3;
    CHECK(support(coef, 1e-9) == IndexSet{2});
    coef.beta.setZero();
    CHECK(support(coef, 0.0).empty());
    CHECK_THROWS_AS(support(coef, -1.0), param_error);
}

TEST_CASE("coordinate descent produces exact zeros") {
    Rng rng(26);
    const auto inst = random_lasso_instance(rng);
    const CoefficientVector coef = fit(inst.x, inst.y, lasso_spec(inst.lambda));
    int exact_zeros = 0;
    for (Eigen::Index j = 0; j < coef.beta.size(); ++j)
        if (coef.beta[j] == 0.0) ++exact_zeros;
    CHECK(exact_zeros > 0);
    CHECK(support(coef, 0.0).size() + static_cast<std::size_t>(exact_zeros) ==
          static_cast<std::size_t>(coef.beta.size()));
}

TEST_CASE("invalid inputs are rejected") {
    Matrix x = Matrix::Ones(4, 2);
    Vector y = Vector::Ones(4);
    CHECK_THROWS_AS(fit(x, y, lasso_spec(0.0)), param_error);
    SelectorSpec bad_alpha = lasso_spec(0.1);
    bad_alpha.alpha = 0.0;
    CHECK_THROWS_AS(fit(x, y, bad_alpha), param_error);
    SelectorSpec lasso_nonunit = lasso_spec(0.1);
    lasso_nonunit.alpha = 0.5;  // kind lasso demands alpha 1
    CHECK_THROWS_AS(fit(x, y, lasso_nonunit), param_error);

    x(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit(x, y, lasso_spec(0.1)), param_error);
    x(1, 1) = 1.0;
    y[2] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fit(x, y, lasso_spec(0.1)), param_error);

    Vector short_y = Vector::Ones(3);
    CHECK_THROWS_AS(fit(x, short_y, lasso_spec(0.1)), param_error);
}

TEST_CASE("cross-validated lambda: determinism and the 1se rule") {
    Rng rng(27);
    const int n = 50, p = 10;
    const Matrix x = random_gaussian(n, p, rng);
    Vector beta_true = Vector::Zero(p);
    beta_true[0] = 3.0;
    beta_true[4] = -2.0;
    Vector y = x * beta_true;
    for (int i = 0; i < n; ++i) y[i] += 0.5 * rng.next_gaussian();

    CHECK(cv_lambda_1se(x, y, 1.0, 5, 31) == cv_lambda_1se(x, y, 1.0, 5, 31));

    const CvCurve curve = cv_curve(x, y, 1.0, 5, 31);
    const double chosen = curve.grid[static_cast<std::size_t>(curve.chosen_index)];
    CHECK(chosen == cv_lambda_1se(x, y, 1.0, 5, 31));
    // 1se rule: largest grid value within one standard error of the minimum.
    CHECK(chosen >= curve.grid[static_cast<std::size_t>(curve.min_index)]);
    const double cutoff = curve.mean_mse[curve.min_index] + curve.se_at_min;
    CHECK(curve.mean_mse[curve.chosen_index] <= cutoff);
    for (int k = 0; k < curve.chosen_index; ++k) CHECK(curve.mean_mse[k] > cutoff);

    // Independent recomputation of the CV losses at the chosen lambda from
    // the recorded fold assignment, with cold-start fits.
    for (int f = 0; f < 2; ++f) {
        std::vector<int> test_rows, train_rows;
        for (int i = 0; i < n; ++i)
            (curve.fold_of_row[static_cast<std::size_t>(i)] == f ? test_rows : train_rows)
                .push_back(i);
        Matrix xt(train_rows.size(), p), xv(test_rows.size(), p);
        Vector yt(train_rows.size()), yv(test_rows.size());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            xt.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
            yt[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
        }
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            xv.row(static_cast<Eigen::Index>(i)) = x.row(test_rows[i]);
            yv[static_cast<Eigen::Index>(i)] = y[test_rows[i]];
        }
        const CoefficientVector coef = fit(xt, yt, lasso_spec(chosen));
        const double mse = (yv - xv * coef.beta).squaredNorm() / yv.size();
        CHECK(mse == doctest::Approx(curve.fold_mse(f, curve.chosen_index)).epsilon(1e-4));
    }

    CHECK_THROWS_AS(cv_lambda_1se(x, y, 1.0, 1, 31), param_error);
    CHECK_THROWS_AS(cv_lambda_1se(x, Vector::Zero(n), 1.0, 5, 31), data_error);
}

TEST_CASE("cv on pure noise picks at least the minimizing lambda") {
    Rng rng(28);
    const Matrix x = random_gaussian(40, 15, rng);
    Vector y(40);
    for (int i = 0; i < 40; ++i) y[i] = rng.next_gaussian();
    const CvCurve curve = cv_curve(x, y, 1.0, 4, 8);
    CHECK(curve.grid[static_cast<std::size_t>(curve.chosen_index)] >=
          curve.grid[static_cast<std::size_t>(curve.min_index)]);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("properties");

TEST_CASE("solver oracle agreement over random instances") {
    Rng rng(900);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_lasso_instance(rng, 40, 60);
        const CoefficientVector coef = fit(inst.x, inst.y, lasso_spec(inst.lambda));
        REQUIRE(coef.converged);
        const Vector oracle = prox_gradient_lasso(inst.x, inst.y, inst.lambda, 1e-10);
        CHECK((coef.beta - oracle).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(kkt_residual(inst.x, inst.y, coef.beta, inst.lambda, 1.0) < 1e-6);
    }
}

TEST_SUITE_END();
