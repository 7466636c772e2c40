#include "jsel/reference.hpp"

#include <cmath>
#include <numeric>

#include "jsel/rng.hpp"

namespace jsel::reference {

StabilityPath stability_path_serial(const Matrix& x, const Vector& y,
                                    const SelectorSpec& selector, const NoiseGrid& grid,
                                    FitPolicy policy) {
    validate(grid);
    validate(selector);
    const auto m = static_cast<int>(grid.deltas.size());
    const auto p = static_cast<int>(x.cols());

    StabilityPath path;
    path.grid = grid;
    path.selector = selector;
    path.freqs.resize(m, p);

    for (int d = 0; d < m; ++d) {
        const double delta = grid.deltas[static_cast<std::size_t>(d)];
        const std::uint64_t row_seed = child_seed(grid.base_seed, static_cast<std::uint64_t>(d));
        std::vector<int> counts(static_cast<std::size_t>(p), 0);
        for (int b = 0; b < grid.B; ++b) {
            const std::uint64_t seed = child_seed(row_seed, static_cast<std::uint64_t>(b));
            Matrix xp = x;
            if (delta > 0.0) {
                Rng rng(seed);
                for (Eigen::Index j = 0; j < xp.cols(); ++j)
                    for (Eigen::Index i = 0; i < xp.rows(); ++i)
                        xp(i, j) += delta * rng.next_gaussian();
            }
            if (policy == FitPolicy::standardized) standardize_columns_inplace(xp);
            const CoefficientVector coef = fit(xp, y, selector);
            if (!coef.converged) ++path.diagnostics.non_converged;
            for (int j = 0; j < p; ++j)
                if (std::abs(coef.beta[j]) > selector.zero_tol) ++counts[static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < p; ++j)
            path.freqs(d, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) / grid.B;
    }
    return path;
}

Vector stability_selection_frequencies_serial(const Matrix& x, const Vector& y,
                                              const SelectorSpec& selector, int B,
                                              std::uint64_t seed) {
    validate(selector);
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const Eigen::Index half = n / 2;
    std::vector<int> counts(static_cast<std::size_t>(p), 0);
    for (int b = 0; b < B; ++b) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(b)));
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
        for (Eigen::Index j = 0; j < p; ++j)
            if (std::abs(coef.beta[j]) > selector.zero_tol) ++counts[static_cast<std::size_t>(j)];
    }
    Vector freqs(p);
    for (Eigen::Index j = 0; j < p; ++j)
        freqs[j] = static_cast<double>(counts[static_cast<std::size_t>(j)]) / B;
    return freqs;
}

}  // namespace jsel::reference
