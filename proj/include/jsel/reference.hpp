#pragma once

#include "jsel/baselines.hpp"
#include "jsel/jitter.hpp"

// Plain serial implementations of the bagged kernels, written as the
// straight-line loops the parallel versions must reproduce byte for byte.
// Used by the test suite and the benchmark; not part of the fast path.
namespace jsel::reference {

StabilityPath stability_path_serial(const Matrix& x, const Vector& y,
                                    const SelectorSpec& selector, const NoiseGrid& grid,
                                    FitPolicy policy = FitPolicy::plain);

Vector stability_selection_frequencies_serial(const Matrix& x, const Vector& y,
                                              const SelectorSpec& selector, int B,
                                              std::uint64_t seed);

}  // namespace jsel::reference
