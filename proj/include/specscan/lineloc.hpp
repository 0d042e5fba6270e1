#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "specscan/corpus.hpp"

// Weakness line-number estimation. Two routes:
//   1. an affine heuristic over the file dimensions (lines, bytes, words),
//      l = clamp(ceil(kL*fL + kB*fB + kW*fW), 1, lines), with four preset
//      function classes and an optional +-context interval;
//   2. sparse matrices learned from annotated examples, keyed by the exact
//      (lines, bytes, words) triple, storing either the observed line list
//      or a smoothed per-line probability distribution.
// Every estimate stays within [1, lines].

namespace specscan::lineloc {

// Component functions available to the affine estimator. `zero` is the
// placeholder for the bytes/words components, which every preset leaves out.
enum class ComponentFn { zero, half_lines, uniform_random };

// Coefficients are either constants or one of the two dimension ratios.
enum class CoeffKind { constant, words_per_byte, lines_per_byte };

struct Coefficient {
    CoeffKind kind = CoeffKind::constant;
    double value = 1.0;  // constant only
};

struct AffineSpec {
    int function_class = 1;  // 1..4, or 0 for a custom combination
    Coefficient k_lines, k_bytes, k_words;
    ComponentFn f_lines = ComponentFn::half_lines;
    ComponentFn f_bytes = ComponentFn::zero;
    ComponentFn f_words = ComponentFn::zero;
    std::uint64_t context = 0;  // +- lines reported around the estimate
    std::uint64_t seed = 0;     // uniform_random only

    // Presets:
    //   1: k = 1,     f(L) = L/2
    //   2: kL = W/B,  f(L) = L/2
    //   3: kL = L/B,  f(L) = L/2
    //   4: k = 1,     f(L) = seeded uniform draw over [1, L]
    static AffineSpec for_class(int function_class, std::uint64_t context = 0,
                                std::uint64_t seed = 0);
};

struct LineEstimate {
    std::uint64_t line = 0;   // clamped to [1, dims.lines]
    std::uint64_t first = 0;  // context interval, == line when context = 0
    std::uint64_t last = 0;

    friend bool operator==(const LineEstimate&, const LineEstimate&) = default;
};

// l = clamp(ceil(kL*fL + kB*fB + kW*fW), 1, dims.lines), with the context
// interval [max(1, l - context), min(lines, l + context)].
// dims.lines must be >= 1 (throws std::domain_error otherwise).
LineEstimate estimate_line_affine(const corpus::FileDims& dims, const AffineSpec& spec);

using DimsKey = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;  // (L, B, W)

inline DimsKey key_of(const corpus::FileDims& dims) {
    return {dims.lines, dims.bytes, dims.words};
}

// Sparse (lines, bytes, words) -> observed weakness lines, duplicates kept.
struct LineMatrix {
    std::map<DimsKey, std::vector<std::uint64_t>> cells;
};

enum class SmoothingKind { none, add_delta };

struct Smoothing {
    SmoothingKind kind = SmoothingKind::none;
    double delta = 1.0;

    static Smoothing none() { return {SmoothingKind::none, 0.0}; }
    static Smoothing add_delta(double delta) { return {SmoothingKind::add_delta, delta}; }
};

struct LineProbCell {
    std::map<std::uint64_t, std::uint64_t> counts;  // line -> occurrences
    std::uint64_t total = 0;
    std::uint64_t line_count = 0;  // L of the key; smoothing domain is [1, L]
};

struct LineProbMatrix {
    std::map<DimsKey, LineProbCell> cells;
    Smoothing smoothing;

    // P(line | cell); 0 for out-of-range lines.
    double probability(const LineProbCell& cell, std::uint64_t line) const;
};

// Appends every annotated line under its file's dimension key. An
// annotation line beyond the entry's line count throws ValidationError.
LineMatrix learn_line_matrix(const corpus::KnowledgeBaseIndex& index);

// Stored lines for the exact dimension key; otherwise the single affine
// fallback estimate. With ignore_words = true a cell match may ignore the
// words dimension (merging all (L, B, *) cells in key order).
std::vector<std::uint64_t> lookup_lines(const LineMatrix& matrix, const corpus::FileDims& dims,
                                        const AffineSpec& fallback, bool ignore_words = false);

LineProbMatrix learn_line_prob_matrix(const corpus::KnowledgeBaseIndex& index,
                                      const Smoothing& smoothing);

// Same cell statistics derived from an already-built LineMatrix.
LineProbMatrix prob_matrix_from(const LineMatrix& matrix, const Smoothing& smoothing);

// Top-k (line, probability) pairs for the cell of `dims`, ordered by
// descending probability then ascending line. Missing cell -> empty list.
std::vector<std::pair<std::uint64_t, double>> most_probable_lines(const LineProbMatrix& matrix,
                                                                  const corpus::FileDims& dims,
                                                                  std::size_t k);

}  // namespace specscan::lineloc
