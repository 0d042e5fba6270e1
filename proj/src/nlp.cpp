#include "specscan/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specscan::nlp {

double LanguageModel::vocab_size() const {
    return std::pow(256.0, static_cast<double>(order));
}

std::uint64_t gram_index(const std::uint8_t* data, std::size_t pos, std::size_t order) {
    std::uint64_t index = 0;
    for (std::size_t k = 0; k < order; ++k) {
        index = (index << 8) | data[pos + k];
    }
    return index;
}

LanguageModel train_lm(
    const std::vector<std::pair<std::string, std::vector<std::uint8_t>>>& examples,
    std::size_t order, double delta) {
    if (order < 1 || order > 8) throw std::invalid_argument("n-gram order must be in [1,8]");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");

    LanguageModel model;
    model.order = order;
    model.delta = delta;
    for (const auto& [class_id, text] : examples) {
        ClassCounts& cls = model.classes[class_id];
        if (text.size() < order) continue;
        for (std::size_t i = 0; i + order <= text.size(); ++i) {
            ++cls.counts[gram_index(text.data(), i, order)];
            ++cls.total;
        }
    }
    return model;
}

double gram_probability(const LanguageModel& model, const std::string& class_id,
                        std::uint64_t gram) {
    const auto it = model.classes.find(class_id);
    if (it == model.classes.end()) {
        throw std::invalid_argument("unknown class \"" + class_id + "\"");
    }
    const ClassCounts& cls = it->second;
    const auto count_it = cls.counts.find(gram);
    const double count = count_it == cls.counts.end()
                             ? 0.0
                             : static_cast<double>(count_it->second);
    return (count + model.delta) /
           (static_cast<double>(cls.total) + model.delta * model.vocab_size());
}

classify::RankedResult classify_nlp(const LanguageModel& model,
                                    const std::vector<std::uint8_t>& query,
                                    std::size_t top_n) {
    if (model.classes.empty()) throw std::invalid_argument("empty language model");
    if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");

    // Gram counts of the query, shared across classes.
    std::map<std::uint64_t, std::uint64_t> query_counts;
    if (query.size() >= model.order) {
        for (std::size_t i = 0; i + model.order <= query.size(); ++i) {
            ++query_counts[gram_index(query.data(), i, model.order)];
        }
    }

    classify::RankedResult result;
    result.metric = "add-delta";
    result.hypotheses.reserve(model.classes.size());
    for (const auto& [class_id, cls] : model.classes) {
        const double denominator =
            static_cast<double>(cls.total) + model.delta * model.vocab_size();
        double nll = 0.0;
        for (const auto& [gram, qcount] : query_counts) {
            const auto count_it = cls.counts.find(gram);
            const double count = count_it == cls.counts.end()
                                     ? 0.0
                                     : static_cast<double>(count_it->second);
            nll -= static_cast<double>(qcount) *
                   std::log((count + model.delta) / denominator);
        }
        result.hypotheses.push_back({class_id, nll});
    }
    std::stable_sort(result.hypotheses.begin(), result.hypotheses.end(),
                     [](const classify::Hypothesis& x, const classify::Hypothesis& y) {
                         return x.score < y.score;
                     });
    if (result.hypotheses.size() > top_n) result.hypotheses.resize(top_n);
    return result;
}

}  // namespace specscan::nlp
