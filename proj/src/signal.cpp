#include "specscan/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "specscan/kernels.hpp"

namespace specscan::signal {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct FftPlan {
    std::size_t n;
    std::vector<double> cos_table;  // per stage, packed
    std::vector<double> sin_table;

    explicit FftPlan(std::size_t size) : n(size) {
        cos_table.reserve(n);
        sin_table.reserve(n);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double step = -2.0 * std::numbers::pi / static_cast<double>(len);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cos_table.push_back(std::cos(step * static_cast<double>(k)));
                sin_table.push_back(std::sin(step * static_cast<double>(k)));
            }
        }
    }
};

// Iterative radix-2 decimation-in-time transform, in place over split
// re/im arrays.
void fft_inplace(const FftPlan& plan, double* re, double* im) {
    const std::size_t n = plan.n;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i], re[j]);
            std::swap(im[i], im[j]);
        }
    }

    std::size_t table_offset = 0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const double wr = plan.cos_table[table_offset + k];
                const double wi = plan.sin_table[table_offset + k];
                const std::size_t a = start + k;
                const std::size_t b = a + half;
                const double tr = re[b] * wr - im[b] * wi;
                const double ti = re[b] * wi + im[b] * wr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
            }
        }
        table_offset += half;
    }
}

std::vector<double> magnitude_of_window(const FftPlan& plan, std::vector<double> re) {
    std::vector<double> im(plan.n, 0.0);
    fft_inplace(plan, re.data(), im.data());
    std::vector<double> magnitudes(plan.n / 2);
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        magnitudes[k] = std::hypot(re[k], im[k]);
    }
    return magnitudes;
}

}  // namespace

Signal bytes_to_signal(const std::uint8_t* data, std::size_t size, std::size_t n) {
    if (n < 1) throw std::invalid_argument("n-gram size must be >= 1");
    Signal out;
    out.source_len = size;
    if (size < n) return out;

    const double scale = std::pow(256.0, static_cast<double>(n));
    out.samples.resize(size - n + 1);
    // Accumulated in double: exact for n <= 6 (256^6 < 2^53), rounded above.
    for (std::size_t i = 0; i + n <= size; ++i) {
        double value = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            value = value * 256.0 + static_cast<double>(data[i + k]);
        }
        out.samples[i] = value / scale;
    }
    return out;
}

Signal bytes_to_signal(const std::vector<std::uint8_t>& content, std::size_t n) {
    return bytes_to_signal(content.data(), content.size(), n);
}

Signal preprocess(Signal input, PreprocessMode mode) {
    switch (mode) {
        case PreprocessMode::raw: return input;
    }
    return input;
}

std::vector<double> fft_magnitude(const std::vector<double>& window_samples) {
    const std::size_t n = window_samples.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("FFT window size must be a power of two");
    }
    const FftPlan plan(n);
    return magnitude_of_window(plan, window_samples);
}

FeatureVector extract_features(const Signal& signal, std::size_t window) {
    if (!is_power_of_two(window)) {
        throw std::invalid_argument("FFT window size must be a power of two");
    }
    FeatureVector features;
    features.window = window;
    features.values.assign(window / 2, 0.0);
    if (signal.samples.empty()) return features;

    const FftPlan plan(window);
    const auto& kernel = kernels::active();
    std::size_t window_count = 0;
    std::vector<double> buffer(window);
    for (std::size_t start = 0; start < signal.samples.size(); start += window) {
        const std::size_t take = std::min(window, signal.samples.size() - start);
        std::copy_n(signal.samples.begin() + static_cast<std::ptrdiff_t>(start), take,
                    buffer.begin());
        std::fill(buffer.begin() + static_cast<std::ptrdiff_t>(take), buffer.end(), 0.0);
        const std::vector<double> magnitudes = magnitude_of_window(plan, buffer);
        kernel.add_inplace(features.values.data(), magnitudes.data(), magnitudes.size());
        ++window_count;
    }
    kernel.scale_inplace(features.values.data(), features.values.size(),
                         1.0 / static_cast<double>(window_count));
    return features;
}

}  // namespace specscan::signal
