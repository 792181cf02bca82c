#include "ratl/exec.hpp"

namespace ratl {

namespace {
#ifdef _OPENMP
ExecMode g_mode = ExecMode::openmp;
#else
ExecMode g_mode = ExecMode::serial;
#endif
}  // namespace

ExecMode default_exec_mode() { return g_mode; }

void set_default_exec_mode(ExecMode mode) { g_mode = mode; }

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {
bool inside_parallel() {
#ifdef _OPENMP
    return omp_in_parallel() != 0;
#else
    return false;
#endif
}
}  // namespace detail

}  // namespace ratl
