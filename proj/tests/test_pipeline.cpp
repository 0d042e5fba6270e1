#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "specscan/errors.hpp"
#include "specscan/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace specscan;
using testsupport::TempDir;
using testsupport::make_synthetic_corpus;

namespace {

std::vector<pipeline::FileObservation> observations_from(
    const testsupport::SyntheticCorpus& corpus) {
    return pipeline::load_annotated_files(corpus.index, corpus.root, classify::Scheme::cve);
}

}  // namespace

TEST_CASE("signal pipeline classifies its own training set perfectly") {
    TempDir dir("pipe-signal");
    const auto corpus = make_synthetic_corpus(dir.path(), 4, 6);

    pipeline::TrainOptions train_options;
    train_options.window = 256;
    const model::TrainedModel trained =
        pipeline::train_from_index(corpus.index, corpus.root, train_options);
    CHECK(trained.clusters.centroids.size() == 4);
    CHECK(trained.case_name == "synthetic");
    // Every class saw six files once each.
    for (const auto& [id, centroid] : trained.clusters.centroids) {
        CHECK(centroid.training_count == 6);
    }
    CHECK(trained.class_location.begin()->second == corpus::LocationType::sink);

    const auto files = observations_from(corpus);
    REQUIRE(files.size() == corpus.index.entries.size());

    for (const auto kind : {classify::MetricKind::eucl, classify::MetricKind::cheb,
                            classify::MetricKind::diff, classify::MetricKind::cos}) {
        pipeline::ClassifyOptions options;
        options.metric.kind = kind;
        const pipeline::ClassifyOutput output =
            pipeline::classify_files(trained, files, options);
        REQUIRE(output.results.size() == files.size());
        std::size_t hits = 0;
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto& truth = corpus.index.entries[i].annotations[0].cve_id;
            if (output.results[i].hypotheses[0].class_id == *truth) ++hits;
        }
        CHECK(hits == files.size());
    }
}

TEST_CASE("classify_files output is deterministic and thread-count independent") {
    TempDir dir("pipe-det");
    const auto corpus = make_synthetic_corpus(dir.path(), 3, 4);
    pipeline::TrainOptions train_options;
    train_options.window = 256;
    const auto trained = pipeline::train_from_index(corpus.index, corpus.root, train_options);
    const auto files = observations_from(corpus);

    pipeline::ClassifyOptions serial;
    serial.jobs = 1;
    pipeline::ClassifyOptions parallel;
    parallel.jobs = 4;
    const auto a = pipeline::classify_files(trained, files, serial);
    const auto b = pipeline::classify_files(trained, files, parallel);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        CHECK(a.results[i].query_path == b.results[i].query_path);
        REQUIRE(a.results[i].hypotheses.size() == b.results[i].hypotheses.size());
        for (std::size_t h = 0; h < a.results[i].hypotheses.size(); ++h) {
            CHECK(a.results[i].hypotheses[h].class_id == b.results[i].hypotheses[h].class_id);
            CHECK(a.results[i].hypotheses[h].score == b.results[i].hypotheses[h].score);
        }
    }
    REQUIRE(a.findings.size() == b.findings.size());
    for (std::size_t i = 0; i < a.findings.size(); ++i) {
        CHECK(a.findings[i].path == b.findings[i].path);
        CHECK(a.findings[i].class_id == b.findings[i].class_id);
    }
}

TEST_CASE("thresholding empties findings for out-of-distribution trees") {
    TempDir dir("pipe-thresh");
    const auto corpus = make_synthetic_corpus(dir.path(), 3, 5);
    pipeline::TrainOptions train_options;
    train_options.window = 256;
    const auto trained = pipeline::train_from_index(corpus.index, corpus.root, train_options);
    const auto files = observations_from(corpus);

    // Calibrate: worst self score over the training corpus.
    pipeline::ClassifyOptions open;
    const auto self = pipeline::classify_files(trained, files, open);
    double worst_self = 0.0;
    for (const auto& result : self.results) {
        worst_self = std::max(worst_self, result.hypotheses[0].score);
    }

    // Unrelated byte patterns (far-away class indices) land beyond theta.
    std::vector<pipeline::FileObservation> strangers;
    for (std::size_t c = 40; c < 43; ++c) {
        for (std::size_t f = 0; f < 4; ++f) {
            pipeline::FileObservation observation;
            observation.content = testsupport::class_pattern_bytes(c, f);
            observation.path = "s" + std::to_string(c) + "_" + std::to_string(f);
            observation.dims = corpus::file_dimensions(observation.content);
            strangers.push_back(std::move(observation));
        }
    }
    pipeline::ClassifyOptions gated;
    gated.threshold = worst_self * 1.01;
    const auto gated_self = pipeline::classify_files(trained, files, gated);
    CHECK(!gated_self.findings.empty());
    const auto gated_strangers = pipeline::classify_files(trained, strangers, gated);
    CHECK(gated_strangers.findings.empty());
    CHECK(gated_strangers.results.size() == strangers.size());  // results still ranked
}

TEST_CASE("nlp pipeline trains, classifies, and carries line knowledge") {
    TempDir dir("pipe-nlp");
    // Give each class a distinct byte alphabet so unigram models separate.
    corpus::KnowledgeBaseIndex index;
    index.case_name = "nlp-case";
    for (int c = 0; c < 3; ++c) {
        for (int f = 0; f < 3; ++f) {
            const std::string name =
                "c" + std::to_string(c) + "f" + std::to_string(f) + ".c";
            std::string text;
            for (int i = 0; i < 400; ++i) {
                text += static_cast<char>('a' + c * 8 + (i + f) % 8);
                if (i % 40 == 39) text += '\n';
            }
            std::ofstream(dir.path() / name, std::ios::binary) << text;
            corpus::FileEntry entry;
            entry.path = name;
            entry.dims = corpus::file_dimensions(
                std::vector<std::uint8_t>(text.begin(), text.end()));
            corpus::WeaknessAnnotation annotation;
            annotation.cve_id = "CVE-2011-" + std::to_string(100 + c);
            annotation.line = 1 + f;
            entry.annotations.push_back(annotation);
            index.entries.push_back(entry);
        }
    }

    pipeline::TrainOptions train_options;
    train_options.pipeline = model::PipelineKind::nlp;
    train_options.order = 1;
    train_options.delta = 0.5;
    const auto trained = pipeline::train_from_index(index, dir.path(), train_options);
    CHECK(trained.lm.classes.size() == 3);
    CHECK(!trained.lines.cells.empty());

    const auto files = pipeline::load_annotated_files(index, dir.path(), classify::Scheme::cve);
    pipeline::ClassifyOptions options;
    const auto output = pipeline::classify_files(trained, files, options);
    for (std::size_t i = 0; i < files.size(); ++i) {
        CHECK(output.results[i].hypotheses[0].class_id == *index.entries[i].annotations[0].cve_id);
    }
    // Findings carry machine-learned lines for trained dimensions.
    REQUIRE(!output.findings.empty());
    CHECK(!output.findings[0].lines.empty());
    CHECK(output.findings[0].tool_config == "-nopreprep -char -unigram -add-delta");
}

TEST_CASE("config strings mirror the option grammar") {
    model::TrainedModel signal_model;
    signal_model.pipeline = model::PipelineKind::signal;
    signal_model.scheme = classify::Scheme::cve;
    pipeline::ClassifyOptions options;
    options.metric.kind = classify::MetricKind::cheb;
    CHECK(pipeline::config_string(signal_model, options) == "-nopreprep -raw -fft -cheb");

    signal_model.scheme = classify::Scheme::cwe;
    options.metric.kind = classify::MetricKind::mink;
    CHECK(pipeline::config_string(signal_model, options) ==
          "-cweid -nopreprep -raw -fft -mink");

    model::TrainedModel nlp_model;
    nlp_model.pipeline = model::PipelineKind::nlp;
    nlp_model.scheme = classify::Scheme::cve;
    CHECK(pipeline::config_string(nlp_model, options) == "-nopreprep -char -unigram -add-delta");
    CHECK(pipeline::config_slug("-cweid -nopreprep -raw -fft -cheb") ==
          "cweidnoprepreprawfftcheb");
}

TEST_CASE("training demands annotations for the scheme") {
    TempDir dir("pipe-none");
    corpus::KnowledgeBaseIndex index;
    index.case_name = "bare";
    index.entries.push_back({"x.c", {1, 2, 1}, {}});
    std::ofstream(dir.path() / "x.c") << "x\n";
    CHECK_THROWS_AS(pipeline::train_from_index(index, dir.path(), {}), ValidationError);

    corpus::KnowledgeBaseIndex missing;
    missing.case_name = "missing";
    corpus::WeaknessAnnotation annotation;
    annotation.cve_id = "CVE-1";
    missing.entries.push_back({"ghost.c", {1, 2, 1}, {annotation}});
    CHECK_THROWS_AS(pipeline::train_from_index(missing, dir.path(), {}), IoError);
}
