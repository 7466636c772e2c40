#pragma once

#include <cstdint>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jsel {

inline int max_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// workers <= 0 leaves the OpenMP default untouched.
inline void set_workers(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

// Parallel map over [0, n). Tasks must write to disjoint slots; any ordered
// reduction happens in the caller afterwards, which is what makes results
// independent of the worker count. The first exception thrown by a task is
// rethrown after the loop completes.
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
    std::exception_ptr err = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(jsel_parallel_for_err)
            {
                if (!err) err = std::current_exception();
            }
        }
    }
#else
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            if (!err) err = std::current_exception();
        }
    }
#endif
    if (err) std::rethrow_exception(err);
}

}  // namespace jsel
