#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

// Naive O(N^2) DFT used as the independent oracle for the fast transform.
// Deliberately kept free of any production code path.

namespace testsupport {

inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& input) {
    const std::size_t n = input.size();
    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            acc += input[t] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        spectrum[k] = acc;
    }
    return spectrum;
}

inline std::vector<double> naive_dft_magnitudes_half(const std::vector<double>& input) {
    const auto spectrum = naive_dft(input);
    std::vector<double> magnitudes(input.size() / 2);
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        magnitudes[k] = std::abs(spectrum[k]);
    }
    return magnitudes;
}

}  // namespace testsupport
