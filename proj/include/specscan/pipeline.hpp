#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "specscan/classify.hpp"
#include "specscan/corpus.hpp"
#include "specscan/model.hpp"
#include "specscan/report.hpp"

// End-to-end workflows behind the CLI: train a model from an annotated
// index, then classify file observations into ranked results and
// threshold-filtered findings. Classification fans out across worker
// threads; assembly is index-ordered so output never depends on scheduling.

namespace specscan::pipeline {

struct TrainOptions {
    classify::Scheme scheme = classify::Scheme::cve;
    model::PipelineKind pipeline = model::PipelineKind::signal;
    std::size_t window = signal::kDefaultWindow;
    std::size_t ngram = signal::kDefaultNgram;
    std::size_t order = 1;
    double delta = nlp::kDefaultDelta;
};

struct FileObservation {
    std::string path;
    std::vector<std::uint8_t> content;
    corpus::FileDims dims;
};

// Reads the files named by index entries carrying at least one annotation
// with an id of the requested scheme. Missing or unreadable files throw
// IoError naming the path.
std::vector<FileObservation> load_annotated_files(const corpus::KnowledgeBaseIndex& index,
                                                  const std::filesystem::path& root,
                                                  classify::Scheme scheme);

// One feature vector (or byte stream) per (file, class) pair: a file
// annotated with k distinct classes trains each of those k classes once.
model::TrainedModel train_from_index(const corpus::KnowledgeBaseIndex& index,
                                     const std::filesystem::path& root,
                                     const TrainOptions& options);

struct ClassifyOptions {
    classify::Metric metric;  // signal pipeline only
    double delta_override = 0.0;  // nlp pipeline; 0 keeps the model's delta
    std::size_t top_n = 2;
    double threshold = std::numeric_limits<double>::infinity();
    std::uint64_t context = 0;  // +- lines on affine fallback estimates
    std::uint64_t seed = 0;
    unsigned jobs = 0;  // 0 = hardware concurrency
};

struct ClassifyOutput {
    std::vector<classify::RankedResult> results;  // per file, pre-threshold
    std::vector<report::Finding> findings;        // post-threshold
};

// Canonical option string, e.g. "-cweid -nopreprep -raw -fft -cheb" or
// "-nopreprep -char -unigram -add-delta".
std::string config_string(const model::TrainedModel& model, const ClassifyOptions& options);

// File-name slug of a config string ("-nopreprep -raw -fft -cheb" ->
// "noprepreprawfftcheb").
std::string config_slug(const std::string& config);

ClassifyOutput classify_files(const model::TrainedModel& model,
                              const std::vector<FileObservation>& files,
                              const ClassifyOptions& options);

}  // namespace specscan::pipeline
