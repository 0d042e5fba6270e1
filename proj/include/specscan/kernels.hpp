#pragma once

#include <cstddef>

// Dense double-vector primitives behind the feature pipeline and the
// distance classifiers. Every kernel has a scalar reference implementation;
// on x86-64 an AVX2/FMA variant is selected at runtime when the CPU supports
// it. The two backends are equivalence-tested against each other.
//
// Reductions (dot, sum_squared_diff, ...) may reassociate lanes, so SIMD
// results can differ from scalar by normal floating-point accumulation
// error. Element-wise kernels (add_inplace, scale_inplace) and the exact
// kernels (max_abs_diff, count_abs_diff_above) match the scalar backend
// bit for bit.
//
// Minkowski's |a-b|^p reduction needs pow() and stays scalar in
// classify.cpp; it is not part of this table.

namespace specscan::kernels {

struct Backend {
    const char* name;

    // sum_i (a[i]-b[i])^2
    double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
    // max_i |a[i]-b[i]|
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
    // #{i : |a[i]-b[i]| > tol}
    std::size_t (*count_abs_diff_above)(const double* a, const double* b,
                                        std::size_t n, double tol);
    // sum of |a[i]-b[i]| over i with |a[i]-b[i]| > allow
    double (*sum_abs_diff_above)(const double* a, const double* b,
                                 std::size_t n, double allow);
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // dst[i] += src[i]
    void (*add_inplace)(double* dst, const double* src, std::size_t n);
    // v[i] *= factor
    void (*scale_inplace)(double* v, std::size_t n, double factor);
};

const Backend& scalar_backend();

// nullptr when not compiled in or the CPU lacks AVX2+FMA.
const Backend* avx2_backend();

// Runtime-selected backend: AVX2 when available, scalar otherwise.
const Backend& active();

// Test hook. Pass nullptr to restore automatic selection.
void force_backend(const Backend* backend);

}  // namespace specscan::kernels
