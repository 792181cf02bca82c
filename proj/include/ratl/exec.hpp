#ifndef RATL_EXEC_HPP
#define RATL_EXEC_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ratl {

// Execution mode for the data-parallel kernels. Every kernel has a serial
// reference path; the openmp path must produce bit-identical results
// (independent subproblems, fixed combination order).
enum class ExecMode { serial, openmp };

ExecMode default_exec_mode();
void set_default_exec_mode(ExecMode mode);
int max_threads();

namespace detail {
bool inside_parallel();
}

// Runs body(i) for i in [0, n). The openmp path requires body to touch only
// per-index state.
template <typename F>
void parallel_for(std::size_t n, ExecMode mode, F&& body) {
#ifdef _OPENMP
    if (mode == ExecMode::openmp && !detail::inside_parallel() && n > 1) {
        #pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
}

template <typename F>
void parallel_for(std::size_t n, F&& body) {
    parallel_for(n, default_exec_mode(), body);
}

}  // namespace ratl

#endif
