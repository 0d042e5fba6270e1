#include "specscan/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "specscan/errors.hpp"
#include "specscan/lineloc.hpp"

namespace specscan::pipeline {

namespace {

const std::optional<std::string>& scheme_id(const corpus::WeaknessAnnotation& annotation,
                                            classify::Scheme scheme) {
    return scheme == classify::Scheme::cve ? annotation.cve_id : annotation.cwe_id;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read training file " + path.string());
    std::vector<std::uint8_t> content((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read training file " + path.string());
    return content;
}

// Most frequent annotated location type per class; ties resolved by enum
// order (sink, path, fix). Classes with only unknown types stay unknown.
std::map<std::string, corpus::LocationType> mode_location_types(
    const corpus::KnowledgeBaseIndex& index, classify::Scheme scheme) {
    std::map<std::string, std::array<std::uint64_t, 4>> histograms;
    for (const corpus::FileEntry& entry : index.entries) {
        for (const corpus::WeaknessAnnotation& annotation : entry.annotations) {
            const auto& id = scheme_id(annotation, scheme);
            if (!id) continue;
            ++histograms[*id][static_cast<std::size_t>(annotation.location_type)];
        }
    }
    std::map<std::string, corpus::LocationType> result;
    for (const auto& [class_id, histogram] : histograms) {
        std::size_t best = 3;  // unknown
        std::uint64_t best_count = 0;
        for (std::size_t t = 0; t < 3; ++t) {
            if (histogram[t] > best_count) {
                best = t;
                best_count = histogram[t];
            }
        }
        result[class_id] = static_cast<corpus::LocationType>(best);
    }
    return result;
}

unsigned worker_count(unsigned requested, std::size_t work_items) {
    unsigned jobs = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (jobs == 0) jobs = 1;
    return static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(work_items, 1)));
}

}  // namespace

std::vector<FileObservation> load_annotated_files(const corpus::KnowledgeBaseIndex& index,
                                                  const std::filesystem::path& root,
                                                  classify::Scheme scheme) {
    std::vector<FileObservation> files;
    for (const corpus::FileEntry& entry : index.entries) {
        const bool annotated = std::any_of(
            entry.annotations.begin(), entry.annotations.end(),
            [scheme](const corpus::WeaknessAnnotation& a) {
                return scheme_id(a, scheme).has_value();
            });
        if (!annotated) continue;
        FileObservation observation;
        observation.path = entry.path;
        observation.content = read_file(root / entry.path);
        observation.dims = corpus::file_dimensions(observation.content);
        files.push_back(std::move(observation));
    }
    return files;
}

model::TrainedModel train_from_index(const corpus::KnowledgeBaseIndex& index,
                                     const std::filesystem::path& root,
                                     const TrainOptions& options) {
    model::TrainedModel trained;
    trained.pipeline = options.pipeline;
    trained.scheme = options.scheme;
    trained.case_name = index.case_name;
    trained.window = options.window;
    trained.ngram = options.ngram;

    // (class, file) pairs, deduplicated: one contribution per class however
    // many annotations of that class the file carries.
    std::vector<std::pair<std::string, const corpus::FileEntry*>> pairs;
    for (const corpus::FileEntry& entry : index.entries) {
        std::set<std::string> classes;
        for (const corpus::WeaknessAnnotation& annotation : entry.annotations) {
            const auto& id = scheme_id(annotation, options.scheme);
            if (id) classes.insert(*id);
        }
        for (const std::string& class_id : classes) {
            pairs.emplace_back(class_id, &entry);
        }
    }
    if (pairs.empty()) {
        throw ValidationError("index \"" + index.case_name +
                              "\" has no annotations for scheme " +
                              classify::to_string(options.scheme));
    }

    if (options.pipeline == model::PipelineKind::signal) {
        std::vector<std::pair<std::string, signal::FeatureVector>> examples;
        examples.reserve(pairs.size());
        std::map<std::string, signal::FeatureVector> features;  // per path, read once
        for (const auto& [class_id, entry] : pairs) {
            auto it = features.find(entry->path);
            if (it == features.end()) {
                const std::vector<std::uint8_t> content = read_file(root / entry->path);
                const signal::Signal sig = signal::preprocess(
                    signal::bytes_to_signal(content, options.ngram), signal::PreprocessMode::raw);
                it = features.emplace(entry->path,
                                      signal::extract_features(sig, options.window)).first;
            }
            examples.emplace_back(class_id, it->second);
        }
        trained.clusters = classify::train(examples, options.scheme);
    } else {
        std::vector<std::pair<std::string, std::vector<std::uint8_t>>> examples;
        examples.reserve(pairs.size());
        for (const auto& [class_id, entry] : pairs) {
            examples.emplace_back(class_id, read_file(root / entry->path));
        }
        trained.lm = nlp::train_lm(examples, options.order, options.delta);
        trained.lm.scheme = options.scheme;
    }

    trained.class_location = mode_location_types(index, options.scheme);
    trained.lines = lineloc::learn_line_matrix(index);
    return trained;
}

std::string config_string(const model::TrainedModel& model, const ClassifyOptions& options) {
    std::string config;
    if (model.scheme == classify::Scheme::cwe) config += "-cweid ";
    config += "-nopreprep ";
    if (model.pipeline == model::PipelineKind::signal) {
        config += "-raw -fft -";
        config += classify::to_string(options.metric.kind);
    } else {
        config += "-char -unigram -add-delta";
    }
    return config;
}

std::string config_slug(const std::string& config) {
    std::string slug;
    for (const char c : config) {
        if (c != '-' && c != ' ') slug += c;
    }
    return slug;
}

ClassifyOutput classify_files(const model::TrainedModel& model,
                              const std::vector<FileObservation>& files,
                              const ClassifyOptions& options) {
    const std::string config = config_string(model, options);

    nlp::LanguageModel lm = model.lm;
    if (model.pipeline == model::PipelineKind::nlp && options.delta_override > 0.0) {
        lm.delta = options.delta_override;
    }

    ClassifyOutput output;
    output.results.resize(files.size());

    const unsigned jobs = worker_count(options.jobs, files.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            const FileObservation& file = files[i];
            classify::RankedResult result;
            if (model.pipeline == model::PipelineKind::signal) {
                const signal::Signal sig = signal::preprocess(
                    signal::bytes_to_signal(file.content, model.ngram),
                    signal::PreprocessMode::raw);
                const signal::FeatureVector features =
                    signal::extract_features(sig, model.window);
                result = classify::classify(model.clusters, features, options.metric,
                                            options.top_n);
            } else {
                result = nlp::classify_nlp(lm, file.content, options.top_n);
            }
            result.metric = config;
            result.query_path = file.path;
            output.results[i] = std::move(result);
        }
    };
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t) workers.emplace_back(work);
        for (std::thread& worker : workers) worker.join();
    }

    const lineloc::AffineSpec fallback =
        lineloc::AffineSpec::for_class(1, options.context, options.seed);
    for (std::size_t i = 0; i < files.size(); ++i) {
        const classify::RankedResult& result = output.results[i];
        const std::vector<double> probabilities =
            report::rank_probabilities(result.hypotheses);
        const classify::RankedResult kept =
            classify::threshold_filter(result, options.threshold);
        if (kept.hypotheses.empty()) continue;

        std::vector<report::LineRef> lines;
        if (files[i].dims.lines > 0) {
            for (const std::uint64_t line :
                 lineloc::lookup_lines(model.lines, files[i].dims, fallback)) {
                const std::uint64_t first =
                    line > options.context ? line - options.context : 1;
                const std::uint64_t last =
                    std::min(files[i].dims.lines, line + options.context);
                lines.push_back(report::LineRef::interval(line, first, last));
            }
        }

        for (const classify::Hypothesis& hypothesis : kept.hypotheses) {
            report::Finding finding;
            finding.path = files[i].path;
            finding.class_id = hypothesis.class_id;
            finding.score = hypothesis.score;
            for (std::size_t r = 0; r < result.hypotheses.size(); ++r) {
                if (result.hypotheses[r].class_id == hypothesis.class_id) {
                    finding.rank_probability = probabilities[r];
                    break;
                }
            }
            finding.lines = lines;
            const auto location = model.class_location.find(hypothesis.class_id);
            finding.location_type = location == model.class_location.end()
                                        ? corpus::LocationType::unknown
                                        : location->second;
            finding.tool_config = config;
            output.findings.push_back(std::move(finding));
        }
    }
    return output;
}

}  // namespace specscan::pipeline
