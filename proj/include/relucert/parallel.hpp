#pragma once

#include <cstddef>

namespace relucert {

/// Number of threads the parallel kernels may use. Respects the
/// RELU_CERTIFY_THREADS environment variable (read once); defaults to the
/// OpenMP maximum. Always >= 1, and 1 when built without OpenMP.
int thread_count();

/// Overrides the thread cap for the current process (tests, benchmarks).
/// A value <= 0 restores the environment-derived default.
void set_thread_cap(int threads);

}  // namespace relucert
