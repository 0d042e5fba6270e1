#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// Knowledge-base handling: file dimension counting, the annotated
// meta-index document, and deterministic source-tree scanning.
//
// Meta-index schema (normative for this artifact, see docs/formats.md):
//
//   <index case="NAME">
//     <file path="REL" lines="L" bytes="B" words="W">
//       <weakness cve="CVE-..." cwe="CWE-..." line="N" type="sink|path|fix"
//                 fragment="K"/>
//     </file>
//   </index>
//
// Every weakness attribute is optional except that cve or cwe must appear.

namespace specscan::corpus {

// Text dimensions of one file. A line ends at \n, \r, \r\n, or EOF, so a
// non-empty file always has at least one line. A word is a maximal run of
// non-blank bytes, where blank = {space, \t, \r, \n, \f, \v}.
struct FileDims {
    std::uint64_t lines = 0;
    std::uint64_t bytes = 0;
    std::uint64_t words = 0;

    friend bool operator==(const FileDims&, const FileDims&) = default;
};

enum class LocationType { sink, path, fix, unknown };

const char* to_string(LocationType type);

struct WeaknessAnnotation {
    std::optional<std::string> cve_id;
    std::optional<std::string> cwe_id;
    std::optional<std::uint64_t> line;  // 1-based
    LocationType location_type = LocationType::unknown;
    std::optional<std::uint64_t> fragment_size;

    friend bool operator==(const WeaknessAnnotation&, const WeaknessAnnotation&) = default;
};

struct FileEntry {
    std::string path;  // relative, '/'-separated
    FileDims dims;
    std::vector<WeaknessAnnotation> annotations;

    friend bool operator==(const FileEntry&, const FileEntry&) = default;
};

struct KnowledgeBaseIndex {
    std::string case_name;
    std::vector<FileEntry> entries;

    friend bool operator==(const KnowledgeBaseIndex&, const KnowledgeBaseIndex&) = default;
};

struct ScannedFile {
    std::string path;  // relative to the scanned root
    std::vector<std::uint8_t> content;
    FileDims dims;
};

struct ScanResult {
    std::vector<ScannedFile> files;     // sorted by relative path
    std::vector<std::string> warnings;  // unreadable files, scan continued
};

FileDims file_dimensions(const std::uint8_t* data, std::size_t size);
FileDims file_dimensions(const std::vector<std::uint8_t>& content);

// Throws ParseError on malformed XML, ValidationError on invariant
// violations (duplicate paths, annotation without cve and cwe, annotation
// line beyond the entry's line count).
KnowledgeBaseIndex load_index(std::string_view document);

// Deterministic inverse of load_index: entries in input order, fixed
// attribute order, omitted optional attributes.
std::string save_index(const KnowledgeBaseIndex& index);

// Recursively collects regular files under root whose names end with one of
// the extension suffixes (all files when the filter is empty). Files are
// read as raw bytes; output is sorted by relative path. Unreadable files
// become warnings; an unreadable or missing root throws IoError.
ScanResult scan_target(const std::filesystem::path& root,
                       const std::vector<std::string>& extensions = {});

}  // namespace specscan::corpus
