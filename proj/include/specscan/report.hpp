#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specscan/classify.hpp"
#include "specscan/corpus.hpp"

// Findings report rendering and evaluation statistics. Reports are
// byte-deterministic XML (schema in docs/formats.md); every numeric field
// is serialized in fixed-point decimal, never exponential notation. The
// statistics mirror the first/second-guess convention: a first-guess hit is
// counted for both guesses, a second-guess hit only for the second.

namespace specscan::report {

struct LineRef {
    std::uint64_t line = 0;
    std::uint64_t first = 0;  // context interval; first == last == line when absent
    std::uint64_t last = 0;

    static LineRef at(std::uint64_t line) { return {line, line, line}; }
    static LineRef interval(std::uint64_t line, std::uint64_t first, std::uint64_t last) {
        return {line, first, last};
    }
};

struct Finding {
    std::string path;
    std::string class_id;       // CVE or CWE id
    double score = 0.0;         // classifier score, lower is better
    double rank_probability = 0.0;  // normalized to [0,1] across the ranked list
    std::vector<LineRef> lines;
    corpus::LocationType location_type = corpus::LocationType::unknown;
    std::string tool_config;    // canonical option string
};

enum class Guess { first, second };

struct StatsRow {
    Guess guess = Guess::first;
    std::string key;  // configuration string or class id
    std::uint64_t good = 0;
    std::uint64_t bad = 0;
    std::uint64_t precision_hundredths = 0;  // 100 * good / (good + bad), half-up
    bool empty = false;                      // good + bad == 0
};

struct StatsTable {
    std::vector<StatsRow> config_rows;
    std::vector<StatsRow> class_rows;
};

// Percent to two decimals, rounded half-up, returned in hundredths so the
// arithmetic stays exact. (0, 0) yields 0 and is flagged empty by callers.
std::uint64_t precision_hundredths(std::uint64_t good, std::uint64_t bad);

// "92.68" formatting of a precision in hundredths.
std::string format_percent(std::uint64_t hundredths);

// Spreads scores over [0,1]: weight 1/(1+score) normalized across the
// list. Lower scores get larger probabilities; the list sums to 1.
std::vector<double> rank_probabilities(const std::vector<classify::Hypothesis>& hypotheses);

// Counts first/second-guess hits per configuration (RankedResult::metric)
// and per true class. Files with multiple true classes count once per
// configuration row and once under every true class. A result whose path
// has no ground truth in the index throws ValidationError.
StatsTable score_guesses(const std::vector<classify::RankedResult>& results,
                         const corpus::KnowledgeBaseIndex& truth, classify::Scheme scheme);

// Deterministic findings document, sorted by (path, class). An empty
// findings list produces a schema-valid empty report.
std::string emit_report(std::vector<Finding> findings, const std::string& case_name,
                        const std::string& config, classify::Scheme scheme,
                        bool thresholded, std::optional<double> threshold = std::nullopt);

// Plain-text table: first-guess configuration rows by descending precision,
// the second-guess block in the same run order, then the per-class blocks.
std::string emit_stats(const StatsTable& table);

}  // namespace specscan::report
