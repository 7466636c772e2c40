#include "jsel/baselines.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "jsel/parallel.hpp"
#include "jsel/rng.hpp"

namespace jsel {

void validate(const StabilitySelectionSpec& spec) {
    if (spec.B < 2) throw param_error("StabilitySelectionSpec: B must be >= 2");
    if (!(spec.tau > 0.5 && spec.tau <= 1.0))
        throw param_error("StabilitySelectionSpec: tau must lie in (0.5, 1]");
    validate(spec.selector);
}

SelectionResult single_fit_select(const Matrix& x, const Vector& y, const SelectorSpec& selector) {
    const CoefficientVector coef = fit(x, y, selector);
    SelectionResult result;
    result.rule = SelectionRule::threshold;
    result.tau_hat = std::numeric_limits<double>::quiet_NaN();
    result.selected = support(coef, selector.zero_tol);
    result.s_hat = static_cast<int>(result.selected.size());
    result.avg_freqs = Vector::Zero(x.cols());
    for (int j : result.selected) result.avg_freqs[j] = 1.0;
    return result;
}

Vector stability_selection_frequencies(const Matrix& x, const Vector& y,
                                       const SelectorSpec& selector, int B, std::uint64_t seed,
                                       FitDiagnostics* diag) {
    validate(selector);
    if (B < 1) throw param_error("stability_selection_frequencies: B must be >= 1");
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const Eigen::Index half = n / 2;
    if (half < 2) throw param_error("stability_selection_frequencies: subsample smaller than 2");

    std::vector<std::uint8_t> hits(static_cast<std::size_t>(B) * p, 0);
    std::vector<std::uint8_t> conv(static_cast<std::size_t>(B), 1);

    parallel_for(B, [&](std::int64_t b) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(b)));
        // Partial Fisher-Yates: the first `half` entries are a uniform
        // subset drawn without replacement.
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        for (Eigen::Index i = 0; i < half; ++i) {
            const auto k =
                i + static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[i], idx[k]);
        }
        Matrix x_sub(half, p);
        Vector y_sub(half);
        for (Eigen::Index i = 0; i < half; ++i) {
            x_sub.row(i) = x.row(idx[i]);
            y_sub[i] = y[idx[i]];
        }
        const CoefficientVector coef = fit(x_sub, y_sub, selector);
        std::uint8_t* slot = &hits[static_cast<std::size_t>(b) * p];
        for (Eigen::Index j = 0; j < p; ++j)
            if (std::abs(coef.beta[j]) > selector.zero_tol) slot[j] = 1;
        conv[static_cast<std::size_t>(b)] = coef.converged ? 1 : 0;
    });

    std::vector<int> counts(static_cast<std::size_t>(p), 0);
    int non_converged = 0;
    for (int b = 0; b < B; ++b) {
        const std::uint8_t* slot = &hits[static_cast<std::size_t>(b) * p];
        for (Eigen::Index j = 0; j < p; ++j) counts[static_cast<std::size_t>(j)] += slot[j];
        non_converged += 1 - conv[static_cast<std::size_t>(b)];
    }
    if (diag) diag->non_converged += non_converged;

    Vector freqs(p);
    for (Eigen::Index j = 0; j < p; ++j)
        freqs[j] = static_cast<double>(counts[static_cast<std::size_t>(j)]) / B;
    return freqs;
}

StabilitySelectionResult stability_selection(const Matrix& x, const Vector& y,
                                             const StabilitySelectionSpec& spec) {
    validate(spec);
    StabilitySelectionResult result;
    result.freqs = stability_selection_frequencies(x, y, spec.selector, spec.B, spec.seed,
                                                   &result.diagnostics);
    result.selection = threshold_select(result.freqs, spec.tau);
    return result;
}

}  // namespace jsel
