#include "jsel/metrics.hpp"

#include <algorithm>

namespace jsel {

double f1_score(const IndexSet& selected, const IndexSet& truth) {
    if (selected.empty() && truth.empty()) return 1.0;
    if (selected.empty() || truth.empty()) return 0.0;
    IndexSet inter;
    std::set_intersection(selected.begin(), selected.end(), truth.begin(), truth.end(),
                          std::back_inserter(inter));
    const double tp = static_cast<double>(inter.size());
    const double fp = static_cast<double>(selected.size()) - tp;
    const double fn = static_cast<double>(truth.size()) - tp;
    return 2.0 * tp / (2.0 * tp + fp + fn);
}

std::optional<double> nogueira_stability(const Matrix& z) {
    const Eigen::Index r = z.rows();
    const Eigen::Index p = z.cols();
    if (r < 2) throw param_error("nogueira_stability: need at least 2 replications");
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (z(i, j) != 0.0 && z(i, j) != 1.0)
                throw param_error("nogueira_stability: selection matrix entries must be 0 or 1");

    const double kbar = z.sum() / static_cast<double>(r);
    if (kbar <= 0.0 || kbar >= static_cast<double>(p)) return std::nullopt;

    const double correction = static_cast<double>(r) / static_cast<double>(r - 1);
    double mean_var = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double phat = z.col(j).mean();
        mean_var += correction * phat * (1.0 - phat);
    }
    mean_var /= static_cast<double>(p);

    const double ratio = kbar / static_cast<double>(p);
    return 1.0 - mean_var / (ratio * (1.0 - ratio));
}

}  // namespace jsel
