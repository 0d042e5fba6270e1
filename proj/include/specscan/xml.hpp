#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal XML reader/writer for the artifact's own document formats
// (meta-index and findings report). Supported subset: one root element,
// nested elements, attributes, self-closing tags, comments, an optional
// XML declaration, and the five predefined entities. No namespaces, no
// CDATA, no DTD. The reader tracks 1-based line/column for error
// reporting; the writer escapes deterministically.

namespace specscan::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;  // document order
    std::vector<Element> children;
    std::string text;  // concatenated character data, entities resolved
    std::size_t line = 0;
    std::size_t column = 0;

    // Returns nullptr when the attribute is absent.
    const std::string* find_attribute(std::string_view key) const;
};

// Throws specscan::ParseError with line/column on malformed input.
Element parse_document(std::string_view text);

std::string escape_attribute(std::string_view value);
std::string escape_text(std::string_view value);

// Incremental writer producing deterministic, 2-space-indented output with
// attributes in insertion order.
class Writer {
public:
    Writer();

    void open(std::string_view name,
              const std::vector<std::pair<std::string, std::string>>& attributes);
    void self_closing(std::string_view name,
                      const std::vector<std::pair<std::string, std::string>>& attributes);
    void close();

    // Valid once every open() is matched by close().
    std::string str() const;

private:
    void indent();

    std::string out_;
    std::vector<std::string> stack_;
};

}  // namespace specscan::xml
