#include "specscan/model.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "specscan/errors.hpp"

namespace specscan::model {

namespace {

constexpr std::string_view kMagic = "specscan-model 1";

std::string fixed12(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12f", value);
    return buffer;
}

corpus::LocationType location_from(const std::string& token, std::size_t line_no) {
    if (token == "sink") return corpus::LocationType::sink;
    if (token == "path") return corpus::LocationType::path;
    if (token == "fix") return corpus::LocationType::fix;
    if (token == "unknown") return corpus::LocationType::unknown;
    throw ParseError("unknown location type \"" + token + "\"", line_no, 1);
}

// Line-oriented reader with 1-based line numbers for diagnostics.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string& line) {
        if (pos_ >= text_.size()) return false;
        const std::size_t end = text_.find('\n', pos_);
        if (end == std::string_view::npos) {
            line.assign(text_.substr(pos_));
            pos_ = text_.size();
        } else {
            line.assign(text_.substr(pos_, end - pos_));
            pos_ = end + 1;
        }
        ++line_no_;
        return true;
    }

    std::string expect(const std::string& what) {
        std::string line;
        if (!next(line)) throw ParseError("unexpected end of model dump, expected " + what,
                                          line_no_ + 1, 1);
        return line;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

// "key value" with value possibly containing spaces.
std::string expect_keyed(LineReader& reader, const std::string& key) {
    const std::string line = reader.expect("\"" + key + " ...\"");
    if (line.compare(0, key.size(), key) != 0 ||
        (line.size() > key.size() && line[key.size()] != ' ')) {
        throw ParseError("expected \"" + key + " ...\", found \"" + line + "\"",
                         reader.line_no(), 1);
    }
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

std::uint64_t to_u64(const std::string& token, std::size_t line_no) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("expected integer, found \"" + token + "\"", line_no, 1);
    }
    return value;
}

double to_double(const std::string& token, std::size_t line_no) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(token, &consumed);
        if (consumed != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ParseError("expected number, found \"" + token + "\"", line_no, 1);
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

}  // namespace

const char* to_string(PipelineKind kind) {
    return kind == PipelineKind::signal ? "signal" : "nlp";
}

std::string save_model(const TrainedModel& model) {
    std::string out;
    out += kMagic;
    out += '\n';
    out += "pipeline ";
    out += to_string(model.pipeline);
    out += '\n';
    out += "scheme ";
    out += classify::to_string(model.scheme);
    out += '\n';
    out += "case " + model.case_name + '\n';

    if (model.pipeline == PipelineKind::signal) {
        out += "window " + std::to_string(model.window) + '\n';
        out += "ngram " + std::to_string(model.ngram) + '\n';
        const std::size_t bins = model.clusters.bins();
        out += "bins " + std::to_string(bins) + '\n';
        out += "classes " + std::to_string(model.clusters.centroids.size()) + '\n';
        for (const auto& [class_id, centroid] : model.clusters.centroids) {
            const auto location = model.class_location.find(class_id);
            out += "class " + std::to_string(centroid.training_count) + ' ' +
                   corpus::to_string(location == model.class_location.end()
                                         ? corpus::LocationType::unknown
                                         : location->second) +
                   ' ' + class_id + '\n';
            for (std::size_t i = 0; i < bins; ++i) {
                if (i > 0) out += ' ';
                out += fixed12(centroid.mean.values[i]);
            }
            out += '\n';
        }
    } else {
        out += "order " + std::to_string(model.lm.order) + '\n';
        out += "delta " + fixed12(model.lm.delta) + '\n';
        out += "classes " + std::to_string(model.lm.classes.size()) + '\n';
        for (const auto& [class_id, counts] : model.lm.classes) {
            const auto location = model.class_location.find(class_id);
            out += "class " + std::to_string(counts.counts.size()) + ' ' +
                   corpus::to_string(location == model.class_location.end()
                                         ? corpus::LocationType::unknown
                                         : location->second) +
                   ' ' + class_id + '\n';
            for (const auto& [gram, count] : counts.counts) {
                out += std::to_string(gram) + ' ' + std::to_string(count) + '\n';
            }
        }
    }

    out += "linecells " + std::to_string(model.lines.cells.size()) + '\n';
    for (const auto& [key, lines] : model.lines.cells) {
        out += "cell " + std::to_string(std::get<0>(key)) + ' ' +
               std::to_string(std::get<1>(key)) + ' ' + std::to_string(std::get<2>(key)) +
               ' ' + std::to_string(lines.size());
        for (const std::uint64_t line : lines) out += ' ' + std::to_string(line);
        out += '\n';
    }
    out += "end\n";
    return out;
}

TrainedModel load_model(std::string_view text) {
    LineReader reader(text);
    if (reader.expect("header") != kMagic) {
        throw ParseError("not a specscan model dump (bad header)", reader.line_no(), 1);
    }

    TrainedModel model;
    const std::string pipeline = expect_keyed(reader, "pipeline");
    if (pipeline == "signal") {
        model.pipeline = PipelineKind::signal;
    } else if (pipeline == "nlp") {
        model.pipeline = PipelineKind::nlp;
    } else {
        throw ParseError("unknown pipeline \"" + pipeline + "\"", reader.line_no(), 1);
    }
    const std::string scheme = expect_keyed(reader, "scheme");
    if (scheme == "cve") {
        model.scheme = classify::Scheme::cve;
    } else if (scheme == "cwe") {
        model.scheme = classify::Scheme::cwe;
    } else {
        throw ParseError("unknown scheme \"" + scheme + "\"", reader.line_no(), 1);
    }
    model.case_name = expect_keyed(reader, "case");

    if (model.pipeline == PipelineKind::signal) {
        model.window = to_u64(expect_keyed(reader, "window"), reader.line_no());
        model.ngram = to_u64(expect_keyed(reader, "ngram"), reader.line_no());
        const std::uint64_t bins = to_u64(expect_keyed(reader, "bins"), reader.line_no());
        const std::uint64_t class_count =
            to_u64(expect_keyed(reader, "classes"), reader.line_no());
        model.clusters.scheme = model.scheme;
        for (std::uint64_t c = 0; c < class_count; ++c) {
            const std::string header = expect_keyed(reader, "class");
            const std::vector<std::string> tokens = split(header);
            if (tokens.size() < 3) {
                throw ParseError("class header needs count, type, and id",
                                 reader.line_no(), 1);
            }
            classify::Centroid centroid;
            centroid.training_count = to_u64(tokens[0], reader.line_no());
            const corpus::LocationType location = location_from(tokens[1], reader.line_no());
            std::string class_id = tokens[2];
            for (std::size_t i = 3; i < tokens.size(); ++i) class_id += ' ' + tokens[i];

            const std::string values_line = reader.expect("centroid values");
            const std::vector<std::string> values = split(values_line);
            if (values.size() != bins) {
                throw ParseError("expected " + std::to_string(bins) + " centroid values, found " +
                                 std::to_string(values.size()), reader.line_no(), 1);
            }
            centroid.mean.window = model.window;
            centroid.mean.values.reserve(bins);
            for (const std::string& v : values) {
                centroid.mean.values.push_back(to_double(v, reader.line_no()));
            }
            model.class_location[class_id] = location;
            model.clusters.centroids.emplace(std::move(class_id), std::move(centroid));
        }
    } else {
        model.lm.order = to_u64(expect_keyed(reader, "order"), reader.line_no());
        model.lm.delta = to_double(expect_keyed(reader, "delta"), reader.line_no());
        model.lm.scheme = model.scheme;
        const std::uint64_t class_count =
            to_u64(expect_keyed(reader, "classes"), reader.line_no());
        for (std::uint64_t c = 0; c < class_count; ++c) {
            const std::string header = expect_keyed(reader, "class");
            const std::vector<std::string> tokens = split(header);
            if (tokens.size() < 3) {
                throw ParseError("class header needs gram count, type, and id",
                                 reader.line_no(), 1);
            }
            const std::uint64_t gram_count = to_u64(tokens[0], reader.line_no());
            const corpus::LocationType location = location_from(tokens[1], reader.line_no());
            std::string class_id = tokens[2];
            for (std::size_t i = 3; i < tokens.size(); ++i) class_id += ' ' + tokens[i];

            nlp::ClassCounts counts;
            for (std::uint64_t g = 0; g < gram_count; ++g) {
                const std::vector<std::string> pair = split(reader.expect("gram count pair"));
                if (pair.size() != 2) {
                    throw ParseError("expected \"gram count\" pair", reader.line_no(), 1);
                }
                const std::uint64_t gram = to_u64(pair[0], reader.line_no());
                const std::uint64_t count = to_u64(pair[1], reader.line_no());
                counts.counts[gram] = count;
                counts.total += count;
            }
            model.class_location[class_id] = location;
            model.lm.classes.emplace(std::move(class_id), std::move(counts));
        }
    }

    const std::uint64_t cell_count = to_u64(expect_keyed(reader, "linecells"), reader.line_no());
    for (std::uint64_t c = 0; c < cell_count; ++c) {
        const std::vector<std::string> tokens = split(reader.expect("line cell"));
        if (tokens.size() < 5 || tokens[0] != "cell") {
            throw ParseError("expected \"cell L B W n lines...\"", reader.line_no(), 1);
        }
        const std::uint64_t lines = to_u64(tokens[1], reader.line_no());
        const std::uint64_t bytes = to_u64(tokens[2], reader.line_no());
        const std::uint64_t words = to_u64(tokens[3], reader.line_no());
        const std::uint64_t n = to_u64(tokens[4], reader.line_no());
        if (tokens.size() != 5 + n) {
            throw ParseError("cell advertises " + std::to_string(n) + " lines but carries " +
                             std::to_string(tokens.size() - 5), reader.line_no(), 1);
        }
        std::vector<std::uint64_t>& cell = model.lines.cells[{lines, bytes, words}];
        for (std::uint64_t i = 0; i < n; ++i) {
            cell.push_back(to_u64(tokens[5 + i], reader.line_no()));
        }
    }
    if (reader.expect("\"end\"") != "end") {
        throw ParseError("expected \"end\"", reader.line_no(), 1);
    }
    return model;
}

void save_model_file(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file " + path.string());
    out << save_model(model);
    if (!out) throw IoError("failed writing model file " + path.string());
}

TrainedModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read model file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_model(text);
}

}  // namespace specscan::model
