#include "specscan/kernels.hpp"

// AVX2/FMA variants of the vector kernels. This translation unit is compiled
// with -mavx2 -mfma on x86-64 only; kernels.cpp gates selection on cpuid so
// none of these run on hardware without the instructions.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace specscan::kernels {
namespace {

constexpr std::size_t kLanes = 4;  // doubles per __m256d

inline __m256d abs_pd(__m256d v) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign_mask, v);
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double ssd_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double result = hsum_pd(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        result += d * d;
    }
    return result;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        best = _mm256_max_pd(best, abs_pd(d));
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, best);
    double result = lanes[0];
    for (std::size_t k = 1; k < kLanes; ++k) {
        if (lanes[k] > result) result = lanes[k];
    }
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > result) result = d;
    }
    return result;
}

std::size_t count_above_avx2(const double* a, const double* b, std::size_t n,
                             double tol) {
    const __m256d vtol = _mm256_set1_pd(tol);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d gt = _mm256_cmp_pd(abs_pd(d), vtol, _CMP_GT_OQ);
        count += static_cast<std::size_t>(_mm_popcnt_u32(
            static_cast<unsigned>(_mm256_movemask_pd(gt))));
    }
    for (; i < n; ++i) {
        if (std::fabs(a[i] - b[i]) > tol) ++count;
    }
    return count;
}

double sum_above_avx2(const double* a, const double* b, std::size_t n,
                      double allow) {
    const __m256d vallow = _mm256_set1_pd(allow);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d =
            abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        const __m256d gt = _mm256_cmp_pd(d, vallow, _CMP_GT_OQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(d, gt));
    }
    double result = hsum_pd(acc);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > allow) result += d;
    }
    return result;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double result = hsum_pd(acc);
    for (; i < n; ++i) result += a[i] * b[i];
    return result;
}

void add_avx2(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(dst + i,
                         _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
    }
    for (; i < n; ++i) dst[i] += src[i];
}

void scale_avx2(double* v, std::size_t n, double factor) {
    const __m256d vf = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), vf));
    }
    for (; i < n; ++i) v[i] *= factor;
}

}  // namespace

const Backend* avx2_backend_impl() {
    static const Backend backend = {
        "avx2",         ssd_avx2, max_abs_diff_avx2, count_above_avx2,
        sum_above_avx2, dot_avx2, add_avx2,          scale_avx2,
    };
    return &backend;
}

}  // namespace specscan::kernels

#endif  // x86-64
