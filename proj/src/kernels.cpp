#include "specscan/kernels.hpp"

#include <atomic>

namespace specscan::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Backend* avx2_backend_impl();
#endif

const Backend* avx2_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? avx2_backend_impl() : nullptr;
#else
    return nullptr;
#endif
}

namespace {
std::atomic<const Backend*> forced{nullptr};
}

const Backend& active() {
    if (const Backend* f = forced.load(std::memory_order_relaxed)) return *f;
    if (const Backend* simd = avx2_backend()) return *simd;
    return scalar_backend();
}

void force_backend(const Backend* backend) {
    forced.store(backend, std::memory_order_relaxed);
}

}  // namespace specscan::kernels
