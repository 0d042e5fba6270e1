#include "specscan/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <utility>

#include "specscan/errors.hpp"
#include "specscan/xml.hpp"

namespace fs = std::filesystem;

namespace specscan::corpus {

namespace {

bool is_blank(std::uint8_t b) {
    return b == ' ' || b == '\t' || b == '\r' || b == '\n' || b == '\f' || b == '\v';
}

std::uint64_t parse_u64(const xml::Element& element, const std::string& key,
                        const std::string& value) {
    std::uint64_t result = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    auto [ptr, ec] = std::from_chars(first, last, result);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("attribute " + key + "=\"" + value + "\" is not a non-negative integer",
                         element.line, element.column);
    }
    return result;
}

LocationType parse_location_type(const xml::Element& element, const std::string& value) {
    if (value == "sink") return LocationType::sink;
    if (value == "path") return LocationType::path;
    if (value == "fix") return LocationType::fix;
    throw ParseError("unknown weakness type \"" + value + "\"", element.line, element.column);
}

WeaknessAnnotation parse_weakness(const xml::Element& element) {
    WeaknessAnnotation annotation;
    for (const auto& [key, value] : element.attributes) {
        if (key == "cve") {
            annotation.cve_id = value;
        } else if (key == "cwe") {
            annotation.cwe_id = value;
        } else if (key == "line") {
            annotation.line = parse_u64(element, key, value);
        } else if (key == "type") {
            annotation.location_type = parse_location_type(element, value);
        } else if (key == "fragment") {
            annotation.fragment_size = parse_u64(element, key, value);
        } else {
            throw ParseError("unknown attribute \"" + key + "\" on <weakness>",
                             element.line, element.column);
        }
    }
    return annotation;
}

}  // namespace

const char* to_string(LocationType type) {
    switch (type) {
        case LocationType::sink: return "sink";
        case LocationType::path: return "path";
        case LocationType::fix: return "fix";
        case LocationType::unknown: return "unknown";
    }
    return "unknown";
}

FileDims file_dimensions(const std::uint8_t* data, std::size_t size) {
    FileDims dims;
    dims.bytes = size;
    bool in_word = false;
    bool at_line_start = true;
    for (std::size_t i = 0; i < size; ++i) {
        const std::uint8_t b = data[i];
        if (is_blank(b)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++dims.words;
        }
        if (b == '\n') {
            ++dims.lines;
            at_line_start = true;
        } else if (b == '\r') {
            if (i + 1 < size && data[i + 1] == '\n') ++i;  // \r\n is one EOL
            ++dims.lines;
            at_line_start = true;
        } else {
            at_line_start = false;
        }
    }
    if (!at_line_start) ++dims.lines;  // EOF terminates the last line
    return dims;
}

FileDims file_dimensions(const std::vector<std::uint8_t>& content) {
    return file_dimensions(content.data(), content.size());
}

KnowledgeBaseIndex load_index(std::string_view document) {
    const xml::Element root = xml::parse_document(document);
    if (root.name != "index") {
        throw ParseError("expected root element <index>, found <" + root.name + ">",
                         root.line, root.column);
    }

    KnowledgeBaseIndex index;
    if (const std::string* case_name = root.find_attribute("case")) {
        index.case_name = *case_name;
    }

    std::set<std::string> seen_paths;
    for (const xml::Element& file : root.children) {
        if (file.name != "file") {
            throw ParseError("expected <file>, found <" + file.name + ">",
                             file.line, file.column);
        }
        FileEntry entry;
        const std::string* path = file.find_attribute("path");
        if (path == nullptr || path->empty()) {
            throw ParseError("<file> requires a non-empty path attribute",
                             file.line, file.column);
        }
        entry.path = *path;
        if (!seen_paths.insert(entry.path).second) {
            throw ValidationError("duplicate path \"" + entry.path + "\" in index");
        }
        if (const std::string* v = file.find_attribute("lines"))
            entry.dims.lines = parse_u64(file, "lines", *v);
        if (const std::string* v = file.find_attribute("bytes"))
            entry.dims.bytes = parse_u64(file, "bytes", *v);
        if (const std::string* v = file.find_attribute("words"))
            entry.dims.words = parse_u64(file, "words", *v);

        for (const xml::Element& weakness : file.children) {
            if (weakness.name != "weakness") {
                throw ParseError("expected <weakness>, found <" + weakness.name + ">",
                                 weakness.line, weakness.column);
            }
            WeaknessAnnotation annotation = parse_weakness(weakness);
            if (!annotation.cve_id && !annotation.cwe_id) {
                throw ValidationError("entry \"" + entry.path +
                                      "\": weakness carries neither cve nor cwe");
            }
            if (annotation.line) {
                if (*annotation.line < 1) {
                    throw ValidationError("entry \"" + entry.path + "\": line must be >= 1");
                }
                if (entry.dims.lines > 0 && *annotation.line > entry.dims.lines) {
                    throw ValidationError(
                        "entry \"" + entry.path + "\": weakness line " +
                        std::to_string(*annotation.line) + " exceeds file line count " +
                        std::to_string(entry.dims.lines));
                }
            }
            entry.annotations.push_back(std::move(annotation));
        }
        index.entries.push_back(std::move(entry));
    }
    return index;
}

std::string save_index(const KnowledgeBaseIndex& index) {
    xml::Writer writer;
    writer.open("index", {{"case", index.case_name}});
    for (const FileEntry& entry : index.entries) {
        std::vector<std::pair<std::string, std::string>> attrs = {
            {"path", entry.path},
            {"lines", std::to_string(entry.dims.lines)},
            {"bytes", std::to_string(entry.dims.bytes)},
            {"words", std::to_string(entry.dims.words)},
        };
        if (entry.annotations.empty()) {
            writer.self_closing("file", attrs);
            continue;
        }
        writer.open("file", attrs);
        for (const WeaknessAnnotation& annotation : entry.annotations) {
            std::vector<std::pair<std::string, std::string>> wa;
            if (annotation.cve_id) wa.emplace_back("cve", *annotation.cve_id);
            if (annotation.cwe_id) wa.emplace_back("cwe", *annotation.cwe_id);
            if (annotation.line) wa.emplace_back("line", std::to_string(*annotation.line));
            if (annotation.location_type != LocationType::unknown) {
                wa.emplace_back("type", to_string(annotation.location_type));
            }
            if (annotation.fragment_size) {
                wa.emplace_back("fragment", std::to_string(*annotation.fragment_size));
            }
            writer.self_closing("weakness", wa);
        }
        writer.close();
    }
    writer.close();
    return writer.str();
}

ScanResult scan_target(const fs::path& root, const std::vector<std::string>& extensions) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw IoError("scan root is not a readable directory: " + root.string());
    }

    const auto matches = [&extensions](const std::string& name) {
        if (extensions.empty()) return true;
        return std::any_of(extensions.begin(), extensions.end(),
                           [&name](const std::string& ext) {
                               return name.size() >= ext.size() &&
                                      name.compare(name.size() - ext.size(), ext.size(),
                                                   ext) == 0;
                           });
    };

    std::vector<std::string> paths;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw IoError("cannot iterate scan root " + root.string() + ": " + ec.message());
    for (const fs::directory_entry& entry : it) {
        if (!entry.is_regular_file(ec) || ec) continue;
        std::string rel = entry.path().lexically_relative(root).generic_string();
        if (matches(rel)) paths.push_back(std::move(rel));
    }
    std::sort(paths.begin(), paths.end());

    ScanResult result;
    for (std::string& rel : paths) {
        std::ifstream in(root / rel, std::ios::binary);
        if (!in) {
            result.warnings.push_back("unreadable file skipped: " + rel);
            continue;
        }
        ScannedFile file;
        file.content.assign(std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>());
        if (in.bad()) {
            result.warnings.push_back("unreadable file skipped: " + rel);
            continue;
        }
        file.path = std::move(rel);
        file.dims = file_dimensions(file.content);
        result.files.push_back(std::move(file));
    }
    return result;
}

}  // namespace specscan::corpus
