#include "relucert/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace relucert {

namespace {

int env_thread_cap() {
    const char* raw = std::getenv("RELU_CERTIFY_THREADS");
    if (raw == nullptr) return 0;
    try {
        int v = std::stoi(raw);
        return v > 0 ? v : 0;
    } catch (...) {
        return 0;
    }
}

std::atomic<int> g_override{0};

}  // namespace

int thread_count() {
#ifdef _OPENMP
    int cap = g_override.load(std::memory_order_relaxed);
    if (cap <= 0) {
        static const int env_cap = env_thread_cap();
        cap = env_cap;
    }
    int hw = omp_get_max_threads();
    if (cap <= 0 || cap > hw) return hw;
    return cap;
#else
    return 1;
#endif
}

void set_thread_cap(int threads) {
    g_override.store(threads, std::memory_order_relaxed);
}

}  // namespace relucert
