#include "specscan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "specscan/errors.hpp"
#include "specscan/xml.hpp"

namespace specscan::report {

namespace {

std::string fixed6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return buffer;
}

struct GuessCounts {
    std::uint64_t first_good = 0;
    std::uint64_t first_bad = 0;
    std::uint64_t second_good = 0;
    std::uint64_t second_bad = 0;
};

StatsRow make_row(Guess guess, const std::string& key, std::uint64_t good,
                  std::uint64_t bad) {
    StatsRow row;
    row.guess = guess;
    row.key = key;
    row.good = good;
    row.bad = bad;
    row.precision_hundredths = precision_hundredths(good, bad);
    row.empty = good + bad == 0;
    return row;
}

// First-guess rows ranked by descending precision (ties by key); the
// second-guess block repeats the same run order.
std::vector<StatsRow> ordered_rows(const std::map<std::string, GuessCounts>& counts) {
    std::vector<StatsRow> first;
    first.reserve(counts.size());
    for (const auto& [key, c] : counts) {
        first.push_back(make_row(Guess::first, key, c.first_good, c.first_bad));
    }
    std::stable_sort(first.begin(), first.end(), [](const StatsRow& a, const StatsRow& b) {
        return a.precision_hundredths > b.precision_hundredths;
    });

    std::vector<StatsRow> rows = first;
    for (const StatsRow& row : first) {
        const GuessCounts& c = counts.at(row.key);
        rows.push_back(make_row(Guess::second, row.key, c.second_good, c.second_bad));
    }
    return rows;
}

void render_block(std::string& out, const char* key_header,
                  const std::vector<StatsRow>& rows) {
    std::size_t key_width = std::char_traits<char>::length(key_header);
    for (const StatsRow& row : rows) key_width = std::max(key_width, row.key.size());

    char line[512];
    std::snprintf(line, sizeof(line), "%-5s %-4s %-*s %6s %6s %8s\n", "guess", "run",
                  static_cast<int>(key_width), key_header, "good", "bad", "%");
    out += line;

    std::size_t run = 0;
    Guess previous = Guess::second;
    for (const StatsRow& row : rows) {
        run = row.guess == previous ? run + 1 : 1;
        previous = row.guess;
        std::snprintf(line, sizeof(line), "%-5s %-4zu %-*s %6llu %6llu %8s\n",
                      row.guess == Guess::first ? "1st" : "2nd", run,
                      static_cast<int>(key_width), row.key.c_str(),
                      static_cast<unsigned long long>(row.good),
                      static_cast<unsigned long long>(row.bad),
                      (format_percent(row.precision_hundredths) + (row.empty ? "*" : ""))
                          .c_str());
        out += line;
    }
}

}  // namespace

std::uint64_t precision_hundredths(std::uint64_t good, std::uint64_t bad) {
    const std::uint64_t denominator = good + bad;
    if (denominator == 0) return 0;
    // Half-up rounding of 10000 * good / denominator in exact integer math.
    return (2 * 10000 * good + denominator) / (2 * denominator);
}

std::string format_percent(std::uint64_t hundredths) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%llu.%02llu",
                  static_cast<unsigned long long>(hundredths / 100),
                  static_cast<unsigned long long>(hundredths % 100));
    return buffer;
}

std::vector<double> rank_probabilities(const std::vector<classify::Hypothesis>& hypotheses) {
    std::vector<double> weights;
    weights.reserve(hypotheses.size());
    double sum = 0.0;
    for (const classify::Hypothesis& h : hypotheses) {
        const double w = 1.0 / (1.0 + h.score);
        weights.push_back(w);
        sum += w;
    }
    for (double& w : weights) w /= sum;
    return weights;
}

StatsTable score_guesses(const std::vector<classify::RankedResult>& results,
                         const corpus::KnowledgeBaseIndex& truth, classify::Scheme scheme) {
    std::map<std::string, std::set<std::string>> true_classes;
    for (const corpus::FileEntry& entry : truth.entries) {
        for (const corpus::WeaknessAnnotation& annotation : entry.annotations) {
            const auto& id = scheme == classify::Scheme::cve ? annotation.cve_id
                                                             : annotation.cwe_id;
            if (id) true_classes[entry.path].insert(*id);
        }
    }

    std::map<std::string, GuessCounts> per_config;
    std::map<std::string, GuessCounts> per_class;
    for (const classify::RankedResult& result : results) {
        const auto it = true_classes.find(result.query_path);
        if (it == true_classes.end() || it->second.empty()) {
            throw ValidationError("no ground truth for \"" + result.query_path + "\"");
        }
        const std::set<std::string>& truths = it->second;

        const bool first_hit = !result.hypotheses.empty() &&
                               truths.count(result.hypotheses[0].class_id) > 0;
        const bool second_hit =
            first_hit || (result.hypotheses.size() > 1 &&
                          truths.count(result.hypotheses[1].class_id) > 0);

        GuessCounts& config = per_config[result.metric];
        (first_hit ? config.first_good : config.first_bad) += 1;
        (second_hit ? config.second_good : config.second_bad) += 1;
        for (const std::string& cls : truths) {
            GuessCounts& klass = per_class[cls];
            (first_hit ? klass.first_good : klass.first_bad) += 1;
            (second_hit ? klass.second_good : klass.second_bad) += 1;
        }
    }

    StatsTable table;
    table.config_rows = ordered_rows(per_config);
    table.class_rows = ordered_rows(per_class);
    return table;
}

std::string emit_report(std::vector<Finding> findings, const std::string& case_name,
                        const std::string& config, classify::Scheme scheme,
                        bool thresholded, std::optional<double> threshold) {
    std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.path != b.path) return a.path < b.path;
        return a.class_id < b.class_id;
    });

    xml::Writer writer;
    std::vector<std::pair<std::string, std::string>> attrs = {
        {"case", case_name},
        {"config", config},
        {"scheme", classify::to_string(scheme)},
        {"thresholded", thresholded ? "true" : "false"},
    };
    if (threshold) attrs.emplace_back("threshold", fixed6(*threshold));

    if (findings.empty()) {
        writer.self_closing("report", attrs);
        return writer.str();
    }
    writer.open("report", attrs);
    for (const Finding& finding : findings) {
        std::vector<std::pair<std::string, std::string>> fa = {
            {"path", finding.path},
            {"id", finding.class_id},
            {"score", fixed6(finding.score)},
            {"probability", fixed6(finding.rank_probability)},
        };
        if (finding.location_type != corpus::LocationType::unknown) {
            fa.emplace_back("type", corpus::to_string(finding.location_type));
        }
        if (finding.lines.empty()) {
            writer.self_closing("finding", fa);
            continue;
        }
        writer.open("finding", fa);
        for (const LineRef& ref : finding.lines) {
            std::vector<std::pair<std::string, std::string>> la = {
                {"at", std::to_string(ref.line)}};
            if (ref.first != ref.line || ref.last != ref.line) {
                la.emplace_back("first", std::to_string(ref.first));
                la.emplace_back("last", std::to_string(ref.last));
            }
            writer.self_closing("line", la);
        }
        writer.close();
    }
    writer.close();
    return writer.str();
}

std::string emit_stats(const StatsTable& table) {
    std::string out;
    render_block(out, "algorithms", table.config_rows);
    if (!table.class_rows.empty()) {
        render_block(out, "class", table.class_rows);
    }
    return out;
}

}  // namespace specscan::report
