#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "specscan/cli.hpp"
#include "specscan/corpus.hpp"
#include "support/synthetic.hpp"

using namespace specscan;
using testsupport::TempDir;
using testsupport::make_synthetic_corpus;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"specscan"};
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("cli usage errors exit with code 1") {
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--bogus"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--fft", "--nlp"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--cheb", "--eucl"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--nlp", "--cheb"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--fft",
                   "--add-delta", "0.5"}) == 1);
    CHECK(run_cli({"train", "--index", "x.xml", "--model", "m", "--char"}) == 1);
}

TEST_CASE("cli i/o and validation errors map to exits 2 and 3") {
    TempDir dir("cli-err");
    CHECK(run_cli({"train", "--index", (dir.path() / "missing.xml").string(), "--model",
                   (dir.path() / "m.model").string()}) == 2);

    const auto bad_index = dir.path() / "bad.xml";
    std::ofstream(bad_index) << "<index><file path=\"a\" lines=\"10\">"
                                "<weakness cve=\"CVE-1\" line=\"99\"/></file></index>";
    CHECK(run_cli({"train", "--index", bad_index.string(), "--model",
                   (dir.path() / "m.model").string()}) == 3);

    const auto not_xml = dir.path() / "broken.xml";
    std::ofstream(not_xml) << "<index><file";
    CHECK(run_cli({"train", "--index", not_xml.string(), "--model",
                   (dir.path() / "m.model").string()}) == 3);

    CHECK(run_cli({"classify", "--model", (dir.path() / "none.model").string(), "--target",
                   dir.path().string()}) == 2);
}

TEST_CASE("cli index builds a skeleton meta-index") {
    TempDir dir("cli-index");
    std::filesystem::create_directories(dir.path() / "tree");
    std::ofstream(dir.path() / "tree" / "a.c") << "int a;\n";
    std::ofstream(dir.path() / "tree" / "b.java") << "class B {}\n";

    const auto out = dir.path() / "skel.xml";
    CHECK(run_cli({"index", "--target", (dir.path() / "tree").string(), "--out", out.string(),
                   "--case", "demo", "--ext", ".c"}) == 0);

    const corpus::KnowledgeBaseIndex index = corpus::load_index(slurp(out));
    CHECK(index.case_name == "demo");
    REQUIRE(index.entries.size() == 1);
    CHECK(index.entries[0].path == "a.c");
    CHECK(index.entries[0].dims.lines == 1);
    CHECK(index.entries[0].annotations.empty());
}

TEST_CASE("cli train/evaluate round trip reaches full self precision") {
    TempDir dir("cli-e2e");
    const auto corpus_dir = dir.path() / "corpus";
    const auto corpus = make_synthetic_corpus(corpus_dir, 3, 5);
    const auto index_path = dir.path() / "train.xml";
    std::ofstream(index_path, std::ios::binary) << corpus::save_index(corpus.index);

    const auto model_path = dir.path() / "m.model";
    CHECK(run_cli({"train", "--index", index_path.string(), "--root", corpus_dir.string(),
                   "--nopreprep", "--raw", "--fft", "--window", "256", "--model",
                   model_path.string()}) == 0);

    const auto out_dir = dir.path() / "out";
    std::filesystem::create_directories(out_dir);
    CHECK(run_cli({"evaluate", "--model", model_path.string(), "--index", index_path.string(),
                   "--root", corpus_dir.string(), "--cheb", "--out", out_dir.string()}) == 0);

    const auto stats_path = out_dir / "stats-noprepreprawfftcheb-synthetic.txt";
    const auto report_path = out_dir / "report-noprepreprawfftcheb-synthetic.xml";
    REQUIRE(std::filesystem::exists(stats_path));
    REQUIRE(std::filesystem::exists(report_path));
    const std::string stats = slurp(stats_path);
    CHECK(stats.find("-nopreprep -raw -fft -cheb") != std::string::npos);
    CHECK(stats.find("100.00") != std::string::npos);

    // Flag/model mismatches are validation failures.
    CHECK(run_cli({"evaluate", "--model", model_path.string(), "--index", index_path.string(),
                   "--root", corpus_dir.string(), "--nlp", "--char", "--unigram",
                   "--add-delta", "0.5", "--out", out_dir.string()}) == 3);
    CHECK(run_cli({"evaluate", "--model", model_path.string(), "--index", index_path.string(),
                   "--root", corpus_dir.string(), "--cweid", "--out", out_dir.string()}) == 3);
}

TEST_CASE("cli classify of a clean tree writes an empty report") {
    TempDir dir("cli-clean");
    const auto corpus_dir = dir.path() / "corpus";
    const auto corpus = make_synthetic_corpus(corpus_dir, 3, 5);
    const auto index_path = dir.path() / "train.xml";
    std::ofstream(index_path, std::ios::binary) << corpus::save_index(corpus.index);
    const auto model_path = dir.path() / "m.model";
    REQUIRE(run_cli({"train", "--index", index_path.string(), "--root", corpus_dir.string(),
                     "--window", "256", "--model", model_path.string()}) == 0);

    // A "fixed" tree: none of the trained-weak files, different patterns.
    const auto fixed_dir = dir.path() / "fixed";
    std::filesystem::create_directories(fixed_dir);
    for (int f = 0; f < 4; ++f) {
        const auto bytes = testsupport::class_pattern_bytes(77 + f, f);
        std::ofstream(fixed_dir / ("clean" + std::to_string(f) + ".c"), std::ios::binary)
            .write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));
    }

    const auto out_dir = dir.path() / "out";
    std::filesystem::create_directories(out_dir);
    CHECK(run_cli({"classify", "--model", model_path.string(), "--target", fixed_dir.string(),
                   "--cheb", "--threshold", "0.0001", "--case", "fixed", "--out",
                   out_dir.string()}) == 0);
    const std::string report = slurp(out_dir / "report-noprepreprawfftcheb-fixed.xml");
    CHECK(report.find("<finding") == std::string::npos);
    CHECK(report.find("<report") != std::string::npos);
}

// Every reported configuration string must be accepted and run end to end:
// -nopreprep -raw -fft -{eucl,cheb,mink,hamming,diff,cos}, the NLP row, and
// each of them under -cweid.
TEST_CASE("cli accepts every reported configuration") {
    TempDir dir("cli-configs");
    const auto corpus_dir = dir.path() / "corpus";
    const auto corpus = make_synthetic_corpus(corpus_dir, 3, 4);
    const auto index_path = dir.path() / "train.xml";
    std::ofstream(index_path, std::ios::binary) << corpus::save_index(corpus.index);
    const auto out_dir = dir.path() / "out";
    std::filesystem::create_directories(out_dir);

    for (const bool cweid : {false, true}) {
        const std::string model_path =
            (dir.path() / (cweid ? "cwe.model" : "cve.model")).string();
        std::vector<std::string> train_args = {"train",   "--index", index_path.string(),
                                               "--root",  corpus_dir.string(),
                                               "--window", "256",
                                               "--model", model_path};
        if (cweid) train_args.push_back("--cweid");
        REQUIRE(run_cli(train_args) == 0);

        for (const std::string metric :
             {"--eucl", "--cheb", "--mink", "--hamming", "--diff", "--cos"}) {
            std::vector<std::string> args = {"evaluate", "--model", model_path,
                                             "--index", index_path.string(), "--root",
                                             corpus_dir.string(), "--nopreprep", "--raw",
                                             "--fft", metric, "--out", out_dir.string()};
            if (cweid) args.push_back("--cweid");
            if (metric == "--mink") {
                args.push_back("--mink-p");
                args.push_back("4");
            }
            if (metric == "--hamming") {
                args.push_back("--hamming-tol");
                args.push_back("0.01");
            }
            if (metric == "--diff") {
                args.push_back("--diff-allow");
                args.push_back("0.001");
            }
            CHECK(run_cli(args) == 0);
        }

        // The NLP configuration row trains and evaluates as well.
        const std::string nlp_model =
            (dir.path() / (cweid ? "cwe-nlp.model" : "cve-nlp.model")).string();
        std::vector<std::string> nlp_train = {"train", "--index", index_path.string(),
                                              "--root", corpus_dir.string(), "--nopreprep",
                                              "--nlp", "--char", "--unigram", "--add-delta",
                                              "0.5", "--model", nlp_model};
        if (cweid) nlp_train.push_back("--cweid");
        REQUIRE(run_cli(nlp_train) == 0);
        std::vector<std::string> nlp_eval = {"evaluate", "--model", nlp_model, "--index",
                                             index_path.string(), "--root",
                                             corpus_dir.string(), "--nlp", "--out",
                                             out_dir.string()};
        if (cweid) nlp_eval.push_back("--cweid");
        CHECK(run_cli(nlp_eval) == 0);
    }

    // All twelve signal reports plus the two NLP reports landed on disk.
    std::size_t reports = 0;
    for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
        if (entry.path().filename().string().rfind("report-", 0) == 0) ++reports;
    }
    CHECK(reports == 14);
}

TEST_CASE("cli honors the SPECSCAN_OUT environment default") {
    TempDir dir("cli-env");
    const auto corpus_dir = dir.path() / "corpus";
    const auto corpus = make_synthetic_corpus(corpus_dir, 2, 3);
    const auto index_path = dir.path() / "train.xml";
    std::ofstream(index_path, std::ios::binary) << corpus::save_index(corpus.index);
    const auto model_path = dir.path() / "m.model";
    REQUIRE(run_cli({"train", "--index", index_path.string(), "--root", corpus_dir.string(),
                     "--window", "256", "--model", model_path.string()}) == 0);

    const auto env_out = dir.path() / "env-out";
    std::filesystem::create_directories(env_out);
    setenv("SPECSCAN_OUT", env_out.string().c_str(), 1);
    CHECK(run_cli({"classify", "--model", model_path.string(), "--target",
                   corpus_dir.string(), "--cheb", "--case", "envcase"}) == 0);
    unsetenv("SPECSCAN_OUT");
    CHECK(std::filesystem::exists(env_out / "report-noprepreprawfftcheb-envcase.xml"));
}

TEST_CASE("cli nlp training uses the add-delta pipeline end to end") {
    TempDir dir("cli-nlp");
    const auto corpus_dir = dir.path() / "corpus";
    std::filesystem::create_directories(corpus_dir);
    corpus::KnowledgeBaseIndex index;
    index.case_name = "nlp";
    for (int c = 0; c < 2; ++c) {
        for (int f = 0; f < 3; ++f) {
            const std::string name = "c" + std::to_string(c) + "f" + std::to_string(f) + ".c";
            std::string text;
            for (int i = 0; i < 200; ++i) text += static_cast<char>('a' + c * 10 + i % 5);
            text += '\n';
            std::ofstream(corpus_dir / name, std::ios::binary) << text;
            corpus::FileEntry entry;
            entry.path = name;
            entry.dims = corpus::file_dimensions(
                std::vector<std::uint8_t>(text.begin(), text.end()));
            corpus::WeaknessAnnotation annotation;
            annotation.cve_id = "CVE-2012-" + std::to_string(c);
            entry.annotations.push_back(annotation);
            index.entries.push_back(entry);
        }
    }
    const auto index_path = dir.path() / "train.xml";
    std::ofstream(index_path, std::ios::binary) << corpus::save_index(index);

    const auto model_path = dir.path() / "nlp.model";
    CHECK(run_cli({"train", "--index", index_path.string(), "--root", corpus_dir.string(),
                   "--nlp", "--char", "--unigram", "--add-delta", "0.5", "--model",
                   model_path.string()}) == 0);

    const auto out_dir = dir.path() / "out";
    std::filesystem::create_directories(out_dir);
    CHECK(run_cli({"evaluate", "--model", model_path.string(), "--index", index_path.string(),
                   "--root", corpus_dir.string(), "--nlp", "--char", "--unigram",
                   "--add-delta", "0.5", "--out", out_dir.string()}) == 0);
    const std::string stats = slurp(out_dir / "stats-nopreprepcharunigramadddelta-nlp.txt");
    CHECK(stats.find("-nopreprep -char -unigram -add-delta") != std::string::npos);
    CHECK(stats.find("100.00") != std::string::npos);
}
