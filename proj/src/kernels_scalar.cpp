#include "specscan/kernels.hpp"

#include <cmath>

// Reference kernels. Plain left-to-right loops; these definitions are the
// semantics the SIMD variants are tested against.

namespace specscan::kernels {
namespace {

double ssd_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > best) best = d;
    }
    return best;
}

std::size_t count_above_scalar(const double* a, const double* b, std::size_t n,
                               double tol) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(a[i] - b[i]) > tol) ++count;
    }
    return count;
}

double sum_above_scalar(const double* a, const double* b, std::size_t n,
                        double allow) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > allow) acc += d;
    }
    return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void add_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void scale_scalar(double* v, std::size_t n, double factor) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= factor;
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend = {
        "scalar",         ssd_scalar, max_abs_diff_scalar, count_above_scalar,
        sum_above_scalar, dot_scalar, add_scalar,          scale_scalar,
    };
    return backend;
}

}  // namespace specscan::kernels
