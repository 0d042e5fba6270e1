#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "specscan/classify.hpp"
#include "specscan/corpus.hpp"
#include "specscan/lineloc.hpp"
#include "specscan/nlp.hpp"

// Versioned textual model dump (format in docs/formats.md). One file holds
// the trained classifier (mean clusters or n-gram counts), the per-class
// location types, and the learned line matrix. Centroid values are written
// in fixed-point decimal with 12 places; counts and line numbers are exact
// integers. Output is deterministic: classes and cells in sorted order.

namespace specscan::model {

enum class PipelineKind { signal, nlp };

const char* to_string(PipelineKind kind);

struct TrainedModel {
    PipelineKind pipeline = PipelineKind::signal;
    classify::Scheme scheme = classify::Scheme::cve;
    std::string case_name;

    // signal pipeline
    std::size_t window = signal::kDefaultWindow;
    std::size_t ngram = signal::kDefaultNgram;
    classify::ClusterModel clusters;

    // nlp pipeline
    nlp::LanguageModel lm;

    // shared side knowledge
    std::map<std::string, corpus::LocationType> class_location;
    lineloc::LineMatrix lines;
};

std::string save_model(const TrainedModel& model);

// Throws ParseError on malformed dumps (line is the dump's line number).
TrainedModel load_model(std::string_view text);

void save_model_file(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model_file(const std::filesystem::path& path);

}  // namespace specscan::model
