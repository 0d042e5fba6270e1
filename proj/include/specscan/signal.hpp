#pragma once

#include <cstdint>
#include <vector>

// Code-as-signal feature pipeline. File bytes become an amplitude signal by
// sliding an n-byte window (step 1) over the content and reading each
// window as an unsigned big-endian integer scaled into [0,1). The signal is
// then cut into non-overlapping power-of-two windows whose FFT magnitude
// spectra are averaged into one fixed-length signature per file.

namespace specscan::signal {

inline constexpr std::size_t kDefaultNgram = 2;
inline constexpr std::size_t kDefaultWindow = 512;

struct Signal {
    std::vector<double> samples;  // each in [0,1)
    std::size_t source_len = 0;   // original byte count
};

struct FeatureVector {
    std::vector<double> values;  // non-negative magnitudes, one per bin
    std::size_t window = 0;      // FFT window size; bins() == window/2

    std::size_t bins() const { return values.size(); }
};

enum class PreprocessMode { raw };

// n >= 1; content shorter than n yields an empty signal.
Signal bytes_to_signal(const std::uint8_t* data, std::size_t size, std::size_t n = kDefaultNgram);
Signal bytes_to_signal(const std::vector<std::uint8_t>& content, std::size_t n = kDefaultNgram);

// `raw` is the identity; the enum is the hook for future filter stages.
Signal preprocess(Signal input, PreprocessMode mode);

// Magnitudes |X_k|, k = 0..N/2-1, of the DFT of the input; N = input size
// must be a power of two. No window taper.
std::vector<double> fft_magnitude(const std::vector<double>& window_samples);

// Splits the signal into consecutive windows of `window` samples (last one
// zero-padded), averages the per-window magnitude spectra element-wise.
// An empty signal produces the all-zero vector.
FeatureVector extract_features(const Signal& signal, std::size_t window = kDefaultWindow);

}  // namespace specscan::signal
