#pragma once

#include <optional>

#include "jsel/common.hpp"

namespace jsel {

// 2 TP / (2 TP + FP + FN). Both sets empty scores 1, exactly one empty
// scores 0, so empty selections aggregate cleanly.
double f1_score(const IndexSet& selected, const IndexSet& truth);

// Across-replication selection stability from an R x p binary matrix
// (row r = indicator vector of the set selected in replication r):
//   Phi = 1 - mean_f s_f^2 / ((kbar/p) (1 - kbar/p)),
// with s_f^2 = (R/(R-1)) phat_f (1 - phat_f) the unbiased column variance
// and kbar the mean selected-set size. Undefined (nullopt) when kbar is 0
// or p, i.e. every replication selected nothing or everything.
std::optional<double> nogueira_stability(const Matrix& z);

}  // namespace jsel
