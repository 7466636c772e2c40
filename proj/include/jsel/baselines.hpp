#pragma once

#include <cstdint>

#include "jsel/common.hpp"
#include "jsel/jitter.hpp"
#include "jsel/selectors.hpp"

namespace jsel {

// Half-sample stability selection: B uniform subsamples of floor(n/2) rows
// without replacement, the full-sample lambda reused on each subsample, no
// per-subsample restandardization.
struct StabilitySelectionSpec {
    int B = 100;
    double tau = 0.6;  // decision threshold in (0.5, 1]
    SelectorSpec selector;
    std::uint64_t seed = 0;
};

void validate(const StabilitySelectionSpec& spec);

// Support of a single fit at fixed tuning; rule = threshold with tau_hat
// reported as NaN.
SelectionResult single_fit_select(const Matrix& x, const Vector& y, const SelectorSpec& selector);

// Subsample b draws with seed child_seed(seed, b); counts reduce in fixed
// order, so frequencies are exact multiples of 1/B and reproducible for any
// worker count. Shared across thresholds: compute once, cut at several taus.
Vector stability_selection_frequencies(const Matrix& x, const Vector& y,
                                       const SelectorSpec& selector, int B, std::uint64_t seed,
                                       FitDiagnostics* diag = nullptr);

struct StabilitySelectionResult {
    Vector freqs;
    SelectionResult selection;
    FitDiagnostics diagnostics;
};

StabilitySelectionResult stability_selection(const Matrix& x, const Vector& y,
                                             const StabilitySelectionSpec& spec);

}  // namespace jsel
