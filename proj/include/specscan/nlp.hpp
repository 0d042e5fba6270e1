#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specscan/classify.hpp"

// Byte n-gram language models with add-delta smoothing, one per class.
// P(g | class) = (c(g) + delta) / (N + delta * V) over the full byte
// alphabet V = 256^order, so unseen grams always carry mass. Classification
// ranks classes by negative log-likelihood of the query bytes, which keeps
// the lower-is-better contract shared with the distance classifiers.

namespace specscan::nlp {

struct ClassCounts {
    std::map<std::uint64_t, std::uint64_t> counts;  // gram index -> count
    std::uint64_t total = 0;                        // N = sum of counts
};

struct LanguageModel {
    classify::Scheme scheme = classify::Scheme::cve;
    std::size_t order = 1;
    double delta = 0.5;
    std::map<std::string, ClassCounts> classes;

    double vocab_size() const;  // 256^order, computed in double
};

inline constexpr double kDefaultDelta = 0.5;

// Big-endian gram index of `order` bytes starting at data[pos].
std::uint64_t gram_index(const std::uint8_t* data, std::size_t pos, std::size_t order);

// Counts every order-length gram (step 1) per class. Empty texts are
// allowed and leave N = 0. Requires order in [1,8] and delta > 0.
LanguageModel train_lm(
    const std::vector<std::pair<std::string, std::vector<std::uint8_t>>>& examples,
    std::size_t order = 1, double delta = kDefaultDelta);

// Smoothed P(gram | class). Unknown class throws std::invalid_argument.
double gram_probability(const LanguageModel& model, const std::string& class_id,
                        std::uint64_t gram);

// score(class) = -sum over query grams of log P(gram | class), ranked
// ascending with lexicographic tie-break. An empty query ties every class.
classify::RankedResult classify_nlp(const LanguageModel& model,
                                    const std::vector<std::uint8_t>& query,
                                    std::size_t top_n);

}  // namespace specscan::nlp
