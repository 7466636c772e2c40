#pragma once

#include <cstdint>
#include <vector>

#include "jsel/common.hpp"
#include "jsel/datagen.hpp"
#include "jsel/selectors.hpp"

namespace jsel {

// Grid of perturbation levels plus the bag count per level. Construction
// sorts the levels; duplicates are rejected.
struct NoiseGrid {
    std::vector<double> deltas;
    int B = 0;
    std::uint64_t base_seed = 0;
};

NoiseGrid make_noise_grid(std::vector<double> deltas, int B, std::uint64_t base_seed);
void validate(const NoiseGrid& grid);

// X + W with W entrywise i.i.d. N(0, delta^2), column-major fill order.
// delta = 0 returns the input bit-identically.
DesignMatrix perturb_design(const DesignMatrix& x, double delta, std::uint64_t seed);

struct FitDiagnostics {
    int non_converged = 0;  // fits counted with their returned support anyway
};

// How each bagged fit sees its design. `standardized` re-centers and
// re-scales the perturbed design before fitting, so the penalty acts
// relative to the jittered column scale — the convention of the reference
// environment's fixed-lambda solvers, and the mechanism that makes
// selection frequencies collapse as delta grows. `plain` fits the perturbed
// design as-is.
enum class FitPolicy { plain, standardized };

// (1/B) sum over bags of the support indicator under jitter level delta.
// Bag b uses seed child_seed(seed, b). Accumulated as integer counts and
// divided once, so every entry is an exact multiple of 1/B.
Vector selection_frequencies(const Matrix& x, const Vector& y, const SelectorSpec& selector,
                             double delta, int B, std::uint64_t seed,
                             FitDiagnostics* diag = nullptr,
                             FitPolicy policy = FitPolicy::plain);

struct StabilityPath {
    NoiseGrid grid;
    Matrix freqs;  // m x p
    SelectorSpec selector;
    FitDiagnostics diagnostics;
};

// Row d holds selection_frequencies at grid.deltas[d] with seed
// child_seed(base_seed, d). The (delta, bag) fit matrix is a parallel map;
// counts are reduced in fixed bag order, so the result does not depend on
// the worker count.
StabilityPath stability_path(const Matrix& x, const Vector& y, const SelectorSpec& selector,
                             const NoiseGrid& grid, FitPolicy policy = FitPolicy::plain);

// Mean across grid rows.
Vector delta_average(const StabilityPath& path);

enum class SelectionRule { largest_gap, top_k, threshold };

struct SelectionResult {
    IndexSet selected;
    SelectionRule rule = SelectionRule::largest_gap;
    int s_hat = 0;
    double tau_hat = 0.0;  // NaN when the rule defines no threshold
    Vector avg_freqs;
    bool degenerate = false;  // all frequencies equal: no gap to cut at
};

// Sort descending, cut at the largest adjacent drop (smallest index on
// ties), threshold at the midpoint of the bracketing values.
SelectionResult largest_gap_select(const Vector& avg_freqs);

// k features with the largest averaged frequencies; ties broken by
// ascending feature index.
SelectionResult top_k_select(const Vector& avg_freqs, int k);

// {j : freqs_j >= tau}.
SelectionResult threshold_select(const Vector& freqs, double tau);

// Hoeffding budget sqrt(log(2 m p / alpha) / (2 B)): with probability at
// least 1 - alpha every empirical cell frequency is within this budget of
// its mean, uniformly over the m x p grid.
double theorem2_epsilon(int m, int p, int B, double alpha);

// CSV surfaces: `delta,feature,frequency` and `feature,avg_freq,selected`
// (feature ids are 1-based; names override when provided).
void write_stability_path_csv(std::ostream& out, const StabilityPath& path);
void write_selection_csv(std::ostream& out, const SelectionResult& result,
                         const std::vector<std::string>& names = {});

}  // namespace jsel
