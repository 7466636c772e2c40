#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "jsel/baselines.hpp"
#include "jsel/datagen.hpp"
#include "jsel/reference.hpp"

using namespace jsel;
using jsel::testing::orthonormal_design;
using jsel::testing::random_gaussian;

namespace {

SelectorSpec lasso_spec(double lambda) {
    SelectorSpec spec;
    spec.lambda = lambda;
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("unit");

TEST_CASE("single fit selection") {
    Rng rng(61);
    const Matrix x = random_gaussian(30, 20, rng);
    Vector y(30);
    for (int i = 0; i < 30; ++i) y[i] = rng.next_gaussian();

    const double lmax = lambda_max(x, y, 1.0);
    const SelectionResult empty = single_fit_select(x, y, lasso_spec(lmax * 1.01));
    CHECK(empty.selected.empty());
    CHECK(empty.rule == SelectionRule::threshold);
    CHECK(std::isnan(empty.tau_hat));

    // Orthonormal design: support matches the closed-form soft thresholds.
    const Matrix q = orthonormal_design(40, 10, rng);
    Vector yq(40);
    for (int i = 0; i < 40; ++i) yq[i] = rng.next_gaussian();
    const double lambda = 0.1;
    const SelectionResult sel = single_fit_select(q, yq, lasso_spec(lambda));
    IndexSet expected;
    for (int j = 0; j < 10; ++j)
        if (std::abs(soft_threshold(q.col(j).dot(yq) / 40.0, lambda)) > 0.0) expected.push_back(j);
    CHECK(sel.selected == expected);
}

TEST_CASE("stability selection spec validation") {
    StabilitySelectionSpec spec;
    spec.selector = lasso_spec(0.1);
    spec.tau = 0.5;
    CHECK_THROWS_AS(validate(spec), param_error);
    spec.tau = 0.7;
    spec.B = 1;
    CHECK_THROWS_AS(validate(spec), param_error);
}

TEST_CASE("stability selection frequencies and thresholding") {
    // One overwhelming predictor so tau = 1 still keeps it.
    Rng rng(62);
    const int n = 40, p = 12;
    Matrix x = random_gaussian(n, p, rng);
    Vector beta = Vector::Zero(p);
    beta[3] = 6.0;
    Vector y = x * beta;
    for (int i = 0; i < n; ++i) y[i] += 0.1 * rng.next_gaussian();

    StabilitySelectionSpec spec;
    spec.B = 100;
    spec.tau = 1.0;
    spec.selector = lasso_spec(0.3);
    spec.seed = 9;
    const StabilitySelectionResult result = stability_selection(x, y, spec);
    CHECK(result.freqs[3] == 1.0);
    CHECK(contains(result.selection.selected, 3));

    // Multiples of 1/B.
    for (Eigen::Index j = 0; j < p; ++j) {
        const double scaled = result.freqs[j] * spec.B;
        CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
    }

    // Determinism and threshold monotonicity.
    const StabilitySelectionResult again = stability_selection(x, y, spec);
    CHECK(result.freqs == again.freqs);
    const IndexSet at_06 = threshold_select(result.freqs, 0.6).selected;
    const IndexSet at_08 = threshold_select(result.freqs, 0.8).selected;
    CHECK(std::includes(at_06.begin(), at_06.end(), at_08.begin(), at_08.end()));
}

TEST_CASE("pure-noise response yields empty selections at permissive thresholds") {
    Rng rng(63);
    const int n = 50, p = 30;
    const Matrix x = random_gaussian(n, p, rng);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.next_gaussian();

    // A lambda large enough that half-sample fits rarely keep anything.
    const double lambda = 0.9 * lambda_max(x, y, 1.0);
    const Vector freqs = stability_selection_frequencies(x, y, lasso_spec(lambda), 50, 31);
    CHECK(freqs.maxCoeff() < 0.6);
    CHECK(threshold_select(freqs, 0.6).selected.empty());
}

TEST_CASE("subsample too small is rejected") {
    Matrix x = Matrix::Ones(3, 2);
    x(1, 0) = 2.0;
    x(2, 1) = -1.0;
    Vector y = Vector::Ones(3);
    CHECK_THROWS_AS(stability_selection_frequencies(x, y, lasso_spec(0.1), 10, 1), param_error);
}

TEST_CASE("parallel stability selection matches the serial reference") {
    Rng rng(64);
    const Matrix x = random_gaussian(36, 15, rng);
    Vector beta = Vector::Zero(15);
    beta[2] = 2.0;
    beta[9] = -1.0;
    Vector y = x * beta;
    for (int i = 0; i < 36; ++i) y[i] += 0.5 * rng.next_gaussian();

    const SelectorSpec spec = lasso_spec(0.15);
    const Vector parallel = stability_selection_frequencies(x, y, spec, 24, 77);
    const Vector serial = reference::stability_selection_frequencies_serial(x, y, spec, 24, 77);
    CHECK(parallel == serial);
}

TEST_SUITE_END();
