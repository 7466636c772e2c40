#include "jsel/jitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "jsel/csv.hpp"
#include "jsel/parallel.hpp"
#include "jsel/rng.hpp"

namespace jsel {

NoiseGrid make_noise_grid(std::vector<double> deltas, int B, std::uint64_t base_seed) {
    std::sort(deltas.begin(), deltas.end());
    NoiseGrid grid{std::move(deltas), B, base_seed};
    validate(grid);
    return grid;
}

void validate(const NoiseGrid& grid) {
    if (grid.deltas.empty()) throw param_error("NoiseGrid: need at least one delta");
    if (grid.B < 1) throw param_error("NoiseGrid: B must be >= 1");
    for (std::size_t i = 0; i < grid.deltas.size(); ++i) {
        if (grid.deltas[i] < 0.0) throw param_error("NoiseGrid: deltas must be >= 0");
        if (i > 0 && grid.deltas[i] <= grid.deltas[i - 1])
            throw param_error("NoiseGrid: deltas must be strictly increasing");
    }
}

DesignMatrix perturb_design(const DesignMatrix& x, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw param_error("perturb_design: delta must be >= 0");
    if (delta == 0.0) return x;
    DesignMatrix out;
    out.values.resize(x.values.rows(), x.values.cols());
    Rng rng(seed);
    for (Eigen::Index j = 0; j < out.values.cols(); ++j)
        for (Eigen::Index i = 0; i < out.values.rows(); ++i)
            out.values(i, j) = x.values(i, j) + delta * rng.next_gaussian();
    out.col_means = x.col_means;
    out.col_scales = x.col_scales;
    out.standardized = false;
    return out;
}

namespace {

// Shared (delta, bag) kernel. Per row d, bag b runs with seed
// child_seed(row_seeds[d], b); supports land in per-task slots and are
// reduced serially in fixed order afterwards.
struct PathCounts {
    std::vector<std::vector<int>> counts;  // [m][p]
    int non_converged = 0;
};

PathCounts path_counts(const Matrix& x, const Vector& y, const SelectorSpec& selector,
                       const std::vector<double>& deltas, int B,
                       const std::vector<std::uint64_t>& row_seeds, FitPolicy policy) {
    validate(selector);
    if (!x.allFinite() || !y.allFinite())
        throw param_error("selection_frequencies: inputs contain NaN or Inf");
    const auto m = static_cast<int>(deltas.size());
    const auto p = static_cast<int>(x.cols());

    // delta = 0 has no randomness: one fit stands in for all B bags.
    std::vector<int> bags_needed(m);
    std::vector<std::int64_t> task_offset(m + 1, 0);
    for (int d = 0; d < m; ++d) {
        bags_needed[d] = deltas[d] == 0.0 ? 1 : B;
        task_offset[d + 1] = task_offset[d] + bags_needed[d];
    }
    const std::int64_t n_tasks = task_offset[m];

    std::vector<std::uint8_t> hits(static_cast<std::size_t>(n_tasks) * p, 0);
    std::vector<std::uint8_t> conv(static_cast<std::size_t>(n_tasks), 1);

    parallel_for(n_tasks, [&](std::int64_t t) {
        const int d = static_cast<int>(std::upper_bound(task_offset.begin(), task_offset.end(), t) -
                                       task_offset.begin()) -
                      1;
        const int b = static_cast<int>(t - task_offset[d]);
        const std::uint64_t seed = child_seed(row_seeds[static_cast<std::size_t>(d)],
                                              static_cast<std::uint64_t>(b));
        CoefficientVector coef;
        if (deltas[d] == 0.0 && policy == FitPolicy::plain) {
            coef = fit(x, y, selector);
        } else {
            Matrix xp = x;
            if (deltas[d] > 0.0) {
                Rng rng(seed);
                for (Eigen::Index j = 0; j < x.cols(); ++j)
                    for (Eigen::Index i = 0; i < x.rows(); ++i)
                        xp(i, j) += deltas[d] * rng.next_gaussian();
            }
            if (policy == FitPolicy::standardized) standardize_columns_inplace(xp);
            coef = fit(xp, y, selector);
        }
        std::uint8_t* slot = &hits[static_cast<std::size_t>(t) * p];
        for (Eigen::Index j = 0; j < coef.beta.size(); ++j)
            if (std::abs(coef.beta[j]) > selector.zero_tol) slot[j] = 1;
        conv[static_cast<std::size_t>(t)] = coef.converged ? 1 : 0;
    });

    PathCounts out;
    out.counts.assign(m, std::vector<int>(p, 0));
    for (int d = 0; d < m; ++d) {
        const int repeat = deltas[d] == 0.0 ? B : 1;
        for (std::int64_t t = task_offset[d]; t < task_offset[d + 1]; ++t) {
            const std::uint8_t* slot = &hits[static_cast<std::size_t>(t) * p];
            for (int j = 0; j < p; ++j) out.counts[d][j] += repeat * slot[j];
            out.non_converged += repeat * (1 - conv[static_cast<std::size_t>(t)]);
        }
    }
    return out;
}

Vector counts_to_freqs(const std::vector<int>& counts, int B) {
    Vector f(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t j = 0; j < counts.size(); ++j)
        f[static_cast<Eigen::Index>(j)] = static_cast<double>(counts[j]) / B;
    return f;
}

}  // namespace

Vector selection_frequencies(const Matrix& x, const Vector& y, const SelectorSpec& selector,
                             double delta, int B, std::uint64_t seed, FitDiagnostics* diag,
                             FitPolicy policy) {
    if (delta < 0.0) throw param_error("selection_frequencies: delta must be >= 0");
    if (B < 1) throw param_error("selection_frequencies: B must be >= 1");
    auto pc = path_counts(x, y, selector, {delta}, B, {seed}, policy);
    if (diag) diag->non_converged += pc.non_converged;
    return counts_to_freqs(pc.counts[0], B);
}

StabilityPath stability_path(const Matrix& x, const Vector& y, const SelectorSpec& selector,
                             const NoiseGrid& grid, FitPolicy policy) {
    validate(grid);
    const auto m = static_cast<int>(grid.deltas.size());
    std::vector<std::uint64_t> row_seeds(m);
    for (int d = 0; d < m; ++d)
        row_seeds[static_cast<std::size_t>(d)] =
            child_seed(grid.base_seed, static_cast<std::uint64_t>(d));

    auto pc = path_counts(x, y, selector, grid.deltas, grid.B, row_seeds, policy);

    StabilityPath path;
    path.grid = grid;
    path.selector = selector;
    path.diagnostics.non_converged = pc.non_converged;
    path.freqs.resize(m, x.cols());
    for (int d = 0; d < m; ++d) path.freqs.row(d) = counts_to_freqs(pc.counts[d], grid.B);
    return path;
}

Vector delta_average(const StabilityPath& path) {
    return path.freqs.colwise().mean();
}

SelectionResult largest_gap_select(const Vector& avg_freqs) {
    const Eigen::Index p = avg_freqs.size();
    if (p < 2) throw param_error("largest_gap_select: need at least 2 features");

    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (avg_freqs[a] != avg_freqs[b]) return avg_freqs[a] > avg_freqs[b];
        return a < b;
    });

    int s_hat = 0;
    double best_gap = 0.0;
    for (int k = 0; k + 1 < p; ++k) {
        const double gap = avg_freqs[order[static_cast<std::size_t>(k)]] -
                           avg_freqs[order[static_cast<std::size_t>(k + 1)]];
        if (gap > best_gap) {
            best_gap = gap;
            s_hat = k + 1;  // model size, 1-based count
        }
    }

    SelectionResult result;
    result.rule = SelectionRule::largest_gap;
    result.avg_freqs = avg_freqs;
    if (best_gap == 0.0) {
        // All frequencies equal: the path is flat and carries no size signal.
        result.degenerate = true;
        result.s_hat = 0;
        result.tau_hat = std::numeric_limits<double>::quiet_NaN();
        return result;
    }
    result.s_hat = s_hat;
    result.tau_hat = 0.5 * (avg_freqs[order[static_cast<std::size_t>(s_hat - 1)]] +
                            avg_freqs[order[static_cast<std::size_t>(s_hat)]]);
    for (int j = 0; j < p; ++j)
        if (avg_freqs[j] >= result.tau_hat) result.selected.push_back(j);
    return result;
}

SelectionResult top_k_select(const Vector& avg_freqs, int k) {
    const Eigen::Index p = avg_freqs.size();
    if (k < 1 || k > p) throw param_error("top_k_select: k out of range");

    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (avg_freqs[a] != avg_freqs[b]) return avg_freqs[a] > avg_freqs[b];
        return a < b;
    });

    SelectionResult result;
    result.rule = SelectionRule::top_k;
    result.avg_freqs = avg_freqs;
    result.s_hat = k;
    result.tau_hat = avg_freqs[order[static_cast<std::size_t>(k - 1)]];
    result.selected.assign(order.begin(), order.begin() + k);
    std::sort(result.selected.begin(), result.selected.end());
    return result;
}

SelectionResult threshold_select(const Vector& freqs, double tau) {
    SelectionResult result;
    result.rule = SelectionRule::threshold;
    result.avg_freqs = freqs;
    result.tau_hat = tau;
    for (Eigen::Index j = 0; j < freqs.size(); ++j)
        if (freqs[j] >= tau) result.selected.push_back(static_cast<int>(j));
    result.s_hat = static_cast<int>(result.selected.size());
    return result;
}

double theorem2_epsilon(int m, int p, int B, double alpha) {
    if (m < 1 || p < 1 || B < 1) throw param_error("theorem2_epsilon: m, p, B must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw param_error("theorem2_epsilon: alpha must lie in (0, 1)");
    return std::sqrt(std::log(2.0 * m * p / alpha) / (2.0 * B));
}

void write_stability_path_csv(std::ostream& out, const StabilityPath& path) {
    out << "delta,feature,frequency\n";
    for (Eigen::Index d = 0; d < path.freqs.rows(); ++d)
        for (Eigen::Index j = 0; j < path.freqs.cols(); ++j)
            out << format_g6(path.grid.deltas[static_cast<std::size_t>(d)]) << ',' << (j + 1)
                << ',' << format_g6(path.freqs(d, j)) << '\n';
}

void write_selection_csv(std::ostream& out, const SelectionResult& result,
                         const std::vector<std::string>& names) {
    out << "feature,avg_freq,selected\n";
    for (Eigen::Index j = 0; j < result.avg_freqs.size(); ++j) {
        if (names.empty())
            out << (j + 1);
        else
            out << names[static_cast<std::size_t>(j)];
        out << ',' << format_g6(result.avg_freqs[j]) << ','
            << (contains(result.selected, static_cast<int>(j)) ? 1 : 0) << '\n';
    }
}

}  // namespace jsel
