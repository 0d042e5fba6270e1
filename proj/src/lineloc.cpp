#include "specscan/lineloc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specscan/errors.hpp"

namespace specscan::lineloc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic draw over [1, lines], mixed from the seed and the file
// dimensions so distinct files get distinct draws under one seed.
std::uint64_t uniform_line_draw(const corpus::FileDims& dims, std::uint64_t seed) {
    std::uint64_t x = splitmix64(seed);
    x = splitmix64(x ^ dims.lines);
    x = splitmix64(x ^ dims.bytes);
    x = splitmix64(x ^ dims.words);
    return 1 + x % dims.lines;
}

double coefficient_value(const Coefficient& k, const corpus::FileDims& dims) {
    switch (k.kind) {
        case CoeffKind::constant: return k.value;
        case CoeffKind::words_per_byte:
            return static_cast<double>(dims.words) / static_cast<double>(dims.bytes);
        case CoeffKind::lines_per_byte:
            return static_cast<double>(dims.lines) / static_cast<double>(dims.bytes);
    }
    return 0.0;
}

double component_value(ComponentFn fn, const corpus::FileDims& dims, std::uint64_t seed) {
    switch (fn) {
        case ComponentFn::zero: return 0.0;
        case ComponentFn::half_lines: return static_cast<double>(dims.lines) / 2.0;
        case ComponentFn::uniform_random:
            return static_cast<double>(uniform_line_draw(dims, seed));
    }
    return 0.0;
}

}  // namespace

AffineSpec AffineSpec::for_class(int function_class, std::uint64_t context,
                                 std::uint64_t seed) {
    AffineSpec spec;
    spec.function_class = function_class;
    spec.context = context;
    spec.seed = seed;
    switch (function_class) {
        case 1: break;
        case 2: spec.k_lines = {CoeffKind::words_per_byte, 0.0}; break;
        case 3: spec.k_lines = {CoeffKind::lines_per_byte, 0.0}; break;
        case 4: spec.f_lines = ComponentFn::uniform_random; break;
        default: throw std::invalid_argument("function class must be 1..4");
    }
    return spec;
}

LineEstimate estimate_line_affine(const corpus::FileDims& dims, const AffineSpec& spec) {
    if (dims.lines < 1) {
        throw std::domain_error("line estimate requires a file with at least one line");
    }
    const double raw = coefficient_value(spec.k_lines, dims) *
                           component_value(spec.f_lines, dims, spec.seed) +
                       coefficient_value(spec.k_bytes, dims) *
                           component_value(spec.f_bytes, dims, spec.seed) +
                       coefficient_value(spec.k_words, dims) *
                           component_value(spec.f_words, dims, spec.seed);
    double line = std::ceil(raw);
    if (line < 1.0) line = 1.0;
    if (line > static_cast<double>(dims.lines)) line = static_cast<double>(dims.lines);

    LineEstimate estimate;
    estimate.line = static_cast<std::uint64_t>(line);
    estimate.first = estimate.line > spec.context ? estimate.line - spec.context : 1;
    estimate.last = std::min(dims.lines, estimate.line + spec.context);
    return estimate;
}

LineMatrix learn_line_matrix(const corpus::KnowledgeBaseIndex& index) {
    LineMatrix matrix;
    for (const corpus::FileEntry& entry : index.entries) {
        for (const corpus::WeaknessAnnotation& annotation : entry.annotations) {
            if (!annotation.line) continue;
            if (*annotation.line > entry.dims.lines) {
                throw ValidationError("entry \"" + entry.path + "\": weakness line " +
                                      std::to_string(*annotation.line) +
                                      " exceeds file line count " +
                                      std::to_string(entry.dims.lines));
            }
            matrix.cells[key_of(entry.dims)].push_back(*annotation.line);
        }
    }
    return matrix;
}

std::vector<std::uint64_t> lookup_lines(const LineMatrix& matrix, const corpus::FileDims& dims,
                                        const AffineSpec& fallback, bool ignore_words) {
    const auto it = matrix.cells.find(key_of(dims));
    if (it != matrix.cells.end() && !it->second.empty()) return it->second;

    if (ignore_words) {
        std::vector<std::uint64_t> merged;
        const DimsKey lo{dims.lines, dims.bytes, 0};
        const DimsKey hi{dims.lines, dims.bytes, UINT64_MAX};
        for (auto cell = matrix.cells.lower_bound(lo);
             cell != matrix.cells.end() && cell->first <= hi; ++cell) {
            merged.insert(merged.end(), cell->second.begin(), cell->second.end());
        }
        if (!merged.empty()) return merged;
    }
    return {estimate_line_affine(dims, fallback).line};
}

double LineProbMatrix::probability(const LineProbCell& cell, std::uint64_t line) const {
    if (line < 1 || line > cell.line_count) return 0.0;
    const auto it = cell.counts.find(line);
    const double count = it == cell.counts.end() ? 0.0 : static_cast<double>(it->second);
    if (smoothing.kind == SmoothingKind::add_delta) {
        return (count + smoothing.delta) /
               (static_cast<double>(cell.total) +
                smoothing.delta * static_cast<double>(cell.line_count));
    }
    if (cell.total == 0) return 0.0;
    return count / static_cast<double>(cell.total);
}

LineProbMatrix prob_matrix_from(const LineMatrix& matrix, const Smoothing& smoothing) {
    LineProbMatrix prob;
    prob.smoothing = smoothing;
    for (const auto& [key, lines] : matrix.cells) {
        LineProbCell& cell = prob.cells[key];
        cell.line_count = std::get<0>(key);
        for (const std::uint64_t line : lines) {
            ++cell.counts[line];
            ++cell.total;
        }
    }
    return prob;
}

LineProbMatrix learn_line_prob_matrix(const corpus::KnowledgeBaseIndex& index,
                                      const Smoothing& smoothing) {
    return prob_matrix_from(learn_line_matrix(index), smoothing);
}

std::vector<std::pair<std::uint64_t, double>> most_probable_lines(const LineProbMatrix& matrix,
                                                                  const corpus::FileDims& dims,
                                                                  std::size_t k) {
    const auto it = matrix.cells.find(key_of(dims));
    if (it == matrix.cells.end()) return {};
    const LineProbCell& cell = it->second;

    std::vector<std::pair<std::uint64_t, double>> ranked;
    ranked.reserve(cell.counts.size());
    for (const auto& [line, count] : cell.counts) {
        ranked.emplace_back(line, matrix.probability(cell, line));
    }
    // Descending probability; the map already yields ascending lines, so a
    // stable sort realizes the smaller-line tie-break.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    if (matrix.smoothing.kind == SmoothingKind::add_delta && ranked.size() < k) {
        // Unseen lines all share the floor probability, below every observed
        // line; fill ascending until k entries or the domain is exhausted.
        for (std::uint64_t line = 1; line <= cell.line_count && ranked.size() < k; ++line) {
            if (cell.counts.find(line) == cell.counts.end()) {
                ranked.emplace_back(line, matrix.probability(cell, line));
            }
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
    }
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

}  // namespace specscan::lineloc
