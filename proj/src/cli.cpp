#include "specscan/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "specscan/corpus.hpp"
#include "specscan/errors.hpp"
#include "specscan/pipeline.hpp"

namespace fs = std::filesystem;

namespace specscan::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

struct Options {
    // paths
    std::string index_path;
    std::string model_path;
    std::string target_path;
    std::string root_path;
    std::string out_path;
    std::string case_name;
    std::vector<std::string> extensions;

    // scheme + pipeline selection
    bool cweid = false;
    bool fft = false;
    bool nlp = false;
    bool char_grams = false;
    bool unigram = false;
    double add_delta = 0.0;  // > 0 when given

    // signal metric
    int metric_flags = 0;
    classify::MetricKind metric = classify::MetricKind::cheb;
    double mink_p = 3.0;
    double hamming_tol = 0.0;
    double diff_allow = 0.0;

    // shared knobs
    std::size_t window = signal::kDefaultWindow;
    std::size_t ngram = signal::kDefaultNgram;
    std::size_t order = 1;
    double threshold = std::numeric_limits<double>::infinity();
    std::size_t top_n = 2;
    std::uint64_t context = 0;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
};

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& message) : std::runtime_error(message) {}
};

void add_metric_flag(CLI::App* command, Options& options, const char* name,
                     classify::MetricKind kind, const char* description) {
    command->add_flag_callback(
        name,
        [&options, kind]() {
            options.metric = kind;
            ++options.metric_flags;
        },
        description);
}

void add_pipeline_flags(CLI::App* command, Options& options) {
    command->add_flag("--cweid", options.cweid, "classify by CWE instead of CVE");
    command->add_flag("--nopreprep", "no preprocessing preparation (accepted no-op)");
    command->add_flag("--raw", "raw signal, no filtering (accepted no-op)");
    command->add_flag("--fft", options.fft, "spectral pipeline (default)");
    command->add_flag("--nlp", options.nlp, "character n-gram pipeline");
    command->add_flag("--char", options.char_grams, "character (byte) grams [nlp]");
    command->add_flag("--unigram", options.unigram, "order-1 grams [nlp]");
    command->add_option("--add-delta", options.add_delta,
                        "add-delta smoothing constant [nlp]")
        ->expected(1);

    add_metric_flag(command, options, "--eucl", classify::MetricKind::eucl,
                    "Euclidean distance [signal]");
    add_metric_flag(command, options, "--cheb", classify::MetricKind::cheb,
                    "Chebyshev distance [signal]");
    add_metric_flag(command, options, "--mink", classify::MetricKind::mink,
                    "Minkowski distance [signal]");
    add_metric_flag(command, options, "--hamming", classify::MetricKind::hamming,
                    "Hamming-style count distance [signal]");
    add_metric_flag(command, options, "--diff", classify::MetricKind::diff,
                    "gated difference distance [signal]");
    add_metric_flag(command, options, "--cos", classify::MetricKind::cos,
                    "cosine distance [signal]");
    command->add_option("--mink-p", options.mink_p, "Minkowski exponent (default 3)");
    command->add_option("--hamming-tol", options.hamming_tol,
                        "Hamming tolerance (default 0)");
    command->add_option("--diff-allow", options.diff_allow,
                        "diff allowance (default 0)");
}

bool signal_flags_used(const Options& options) {
    return options.fft || options.metric_flags > 0;
}

// Pipeline-exclusivity rules shared by train/classify/evaluate.
void check_pipeline_flags(const Options& options) {
    if (options.fft && options.nlp) {
        throw UsageError("--fft and --nlp select different pipelines; pass one");
    }
    if (options.metric_flags > 1) {
        throw UsageError("more than one distance metric given; pass one");
    }
    if (options.nlp && options.metric_flags > 0) {
        throw UsageError("distance metrics apply to the --fft pipeline, not --nlp");
    }
    if (signal_flags_used(options) && !options.nlp &&
        (options.char_grams || options.unigram || options.add_delta > 0.0)) {
        throw UsageError("--char/--unigram/--add-delta apply to the --nlp pipeline");
    }
    if ((options.char_grams || options.unigram || options.add_delta > 0.0) && !options.nlp) {
        throw UsageError("--char/--unigram/--add-delta require --nlp");
    }
}

classify::Metric build_metric(const Options& options) {
    classify::Metric metric;
    metric.kind = options.metric;
    metric.minkowski_p = options.mink_p;
    metric.tolerance = options.hamming_tol;
    metric.allowance = options.diff_allow;
    return metric;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (const char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out.empty() ? "case" : out;
}

fs::path output_dir(const Options& options) {
    if (!options.out_path.empty()) return options.out_path;
    if (const char* env = std::getenv("SPECSCAN_OUT")) return env;
    return ".";
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return buffer.str();
}

corpus::KnowledgeBaseIndex load_index_file(const fs::path& path) {
    return corpus::load_index(read_text_file(path));
}

fs::path default_root(const Options& options) {
    if (!options.root_path.empty()) return options.root_path;
    const fs::path parent = fs::path(options.index_path).parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

pipeline::ClassifyOptions build_classify_options(const Options& options) {
    pipeline::ClassifyOptions classify_options;
    classify_options.metric = build_metric(options);
    classify_options.delta_override = options.add_delta;
    classify_options.top_n = options.top_n;
    classify_options.threshold = options.threshold;
    classify_options.context = options.context;
    classify_options.seed = options.seed;
    classify_options.jobs = options.jobs;
    return classify_options;
}

// Classify/evaluate accept pipeline flags for fidelity with the option
// grammar, but they must agree with what the model was trained as.
void check_model_flags(const model::TrainedModel& trained, const Options& options) {
    if (trained.pipeline == model::PipelineKind::signal && options.nlp) {
        throw ValidationError("--nlp given but the model is a spectral model");
    }
    if (trained.pipeline == model::PipelineKind::nlp && signal_flags_used(options)) {
        throw ValidationError("spectral flags given but the model is an n-gram model");
    }
    if (options.cweid && trained.scheme != classify::Scheme::cwe) {
        throw ValidationError("--cweid given but the model was trained on CVE classes");
    }
}

int run_index(const Options& options) {
    const corpus::ScanResult scan = corpus::scan_target(options.target_path, options.extensions);
    for (const std::string& warning : scan.warnings) {
        std::cerr << "specscan: warning: " << warning << '\n';
    }
    corpus::KnowledgeBaseIndex index;
    index.case_name = options.case_name.empty()
                          ? fs::path(options.target_path).filename().string()
                          : options.case_name;
    if (index.case_name.empty()) index.case_name = "case";
    for (const corpus::ScannedFile& file : scan.files) {
        index.entries.push_back({file.path, file.dims, {}});
    }
    write_text_file(options.out_path, corpus::save_index(index));
    std::cout << "indexed " << index.entries.size() << " files into " << options.out_path
              << '\n';
    return kExitOk;
}

int run_train(const Options& options) {
    check_pipeline_flags(options);
    const corpus::KnowledgeBaseIndex index = load_index_file(options.index_path);

    pipeline::TrainOptions train_options;
    train_options.scheme = options.cweid ? classify::Scheme::cwe : classify::Scheme::cve;
    train_options.pipeline =
        options.nlp ? model::PipelineKind::nlp : model::PipelineKind::signal;
    train_options.window = options.window;
    train_options.ngram = options.ngram;
    train_options.order = options.order;
    train_options.delta = options.add_delta > 0.0 ? options.add_delta : nlp::kDefaultDelta;

    const model::TrainedModel trained =
        pipeline::train_from_index(index, default_root(options), train_options);
    model::save_model_file(trained, options.model_path);

    const std::size_t classes = train_options.pipeline == model::PipelineKind::signal
                                    ? trained.clusters.centroids.size()
                                    : trained.lm.classes.size();
    std::cout << "trained " << classes << " " << classify::to_string(train_options.scheme)
              << " classes into " << options.model_path << '\n';
    return kExitOk;
}

int run_classify(const Options& options) {
    check_pipeline_flags(options);
    const model::TrainedModel trained = model::load_model_file(options.model_path);
    check_model_flags(trained, options);

    const corpus::ScanResult scan = corpus::scan_target(options.target_path, options.extensions);
    for (const std::string& warning : scan.warnings) {
        std::cerr << "specscan: warning: " << warning << '\n';
    }
    std::vector<pipeline::FileObservation> files;
    files.reserve(scan.files.size());
    for (const corpus::ScannedFile& file : scan.files) {
        files.push_back({file.path, file.content, file.dims});
    }

    const pipeline::ClassifyOptions classify_options = build_classify_options(options);
    const pipeline::ClassifyOutput output =
        pipeline::classify_files(trained, files, classify_options);

    const std::string config = pipeline::config_string(trained, classify_options);
    const std::string case_name = !options.case_name.empty()
                                      ? options.case_name
                                      : fs::path(options.target_path).filename().string();
    const bool thresholded = std::isfinite(options.threshold);
    const std::string report = report::emit_report(
        output.findings, case_name, config, trained.scheme, thresholded,
        thresholded ? std::optional<double>(options.threshold) : std::nullopt);

    const fs::path out_dir = output_dir(options);
    const fs::path report_path =
        out_dir / ("report-" + pipeline::config_slug(config) + "-" + sanitize(case_name) +
                   ".xml");
    write_text_file(report_path, report);
    std::cout << "classified " << files.size() << " files, " << output.findings.size()
              << " findings\nreport: " << report_path.string() << '\n';
    return kExitOk;
}

int run_evaluate(const Options& options) {
    check_pipeline_flags(options);
    const model::TrainedModel trained = model::load_model_file(options.model_path);
    check_model_flags(trained, options);

    const corpus::KnowledgeBaseIndex index = load_index_file(options.index_path);
    const std::vector<pipeline::FileObservation> files =
        pipeline::load_annotated_files(index, default_root(options), trained.scheme);
    if (files.empty()) {
        throw ValidationError("index \"" + index.case_name +
                              "\" has no annotated entries to evaluate");
    }

    const pipeline::ClassifyOptions classify_options = build_classify_options(options);
    const pipeline::ClassifyOutput output =
        pipeline::classify_files(trained, files, classify_options);
    const report::StatsTable stats =
        report::score_guesses(output.results, index, trained.scheme);

    const std::string config = pipeline::config_string(trained, classify_options);
    const std::string case_name =
        !options.case_name.empty() ? options.case_name : index.case_name;
    const bool thresholded = std::isfinite(options.threshold);
    const std::string report_text = report::emit_report(
        output.findings, case_name, config, trained.scheme, thresholded,
        thresholded ? std::optional<double>(options.threshold) : std::nullopt);

    const fs::path out_dir = output_dir(options);
    const std::string slug = pipeline::config_slug(config);
    const fs::path report_path =
        out_dir / ("report-" + slug + "-" + sanitize(case_name) + ".xml");
    const fs::path stats_path =
        out_dir / ("stats-" + slug + "-" + sanitize(case_name) + ".txt");
    write_text_file(report_path, report_text);
    write_text_file(stats_path, report::emit_stats(stats));

    std::cout << "evaluated " << files.size() << " files\nreport: " << report_path.string()
              << "\nstats: " << stats_path.string() << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"spectral and n-gram weakness signature scanner"};
    app.require_subcommand(1);
    Options options;

    CLI::App* index = app.add_subcommand(
        "index", "scan a source tree into a meta-index skeleton (no annotations)");
    index->add_option("--target", options.target_path, "source tree to scan")->required();
    index->add_option("--out", options.out_path, "output meta-index file")->required();
    index->add_option("--case", options.case_name, "case label (default: target name)");
    index->add_option("--ext", options.extensions, "filename suffix filter (repeatable)");

    CLI::App* train = app.add_subcommand("train", "learn class signatures from a meta-index");
    train->add_option("--index", options.index_path, "annotated meta-index")->required();
    train->add_option("--root", options.root_path,
                      "tree the index paths are relative to (default: index directory)");
    train->add_option("--model", options.model_path, "output model file")->required();
    train->add_option("--window", options.window, "FFT window size (power of two)");
    train->add_option("--ngram", options.ngram, "signal n-gram size (default 2)");
    train->add_option("--order", options.order, "nlp gram order (default 1)");
    add_pipeline_flags(train, options);

    CLI::App* classify_cmd =
        app.add_subcommand("classify", "scan a target tree against a trained model");
    classify_cmd->add_option("--model", options.model_path, "trained model file")->required();
    classify_cmd->add_option("--target", options.target_path, "tree to scan")->required();
    classify_cmd->add_option("--ext", options.extensions, "filename suffix filter (repeatable)");
    classify_cmd->add_option("--out", options.out_path,
                             "output directory (default: $SPECSCAN_OUT or .)");
    classify_cmd->add_option("--case", options.case_name, "case label for the report");
    classify_cmd->add_option("--threshold", options.threshold,
                             "drop hypotheses scoring above this cutoff");
    classify_cmd->add_option("--top", options.top_n, "hypotheses per file (default 2)");
    classify_cmd->add_option("--context", options.context, "+- context lines on estimates");
    classify_cmd->add_option("--seed", options.seed, "seed for randomized estimators");
    classify_cmd->add_option("--jobs", options.jobs, "worker threads (default: cores)");
    add_pipeline_flags(classify_cmd, options);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "classify an annotated index and score the guesses");
    evaluate->add_option("--model", options.model_path, "trained model file")->required();
    evaluate->add_option("--index", options.index_path, "annotated meta-index (ground truth)")
        ->required();
    evaluate->add_option("--root", options.root_path,
                         "tree the index paths are relative to (default: index directory)");
    evaluate->add_option("--out", options.out_path,
                         "output directory (default: $SPECSCAN_OUT or .)");
    evaluate->add_option("--case", options.case_name, "case label for the outputs");
    evaluate->add_option("--threshold", options.threshold,
                         "drop hypotheses scoring above this cutoff");
    evaluate->add_option("--top", options.top_n, "hypotheses per file (default 2)");
    evaluate->add_option("--context", options.context, "+- context lines on estimates");
    evaluate->add_option("--seed", options.seed, "seed for randomized estimators");
    evaluate->add_option("--jobs", options.jobs, "worker threads (default: cores)");
    add_pipeline_flags(evaluate, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (index->parsed()) return run_index(options);
        if (train->parsed()) return run_train(options);
        if (classify_cmd->parsed()) return run_classify(options);
        return run_evaluate(options);
    } catch (const UsageError& e) {
        std::cerr << "specscan: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "specscan: i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        std::cerr << "specscan: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "specscan: validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "specscan: error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace specscan::cli
