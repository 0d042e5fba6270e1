#include "specscan/xml.hpp"

#include <cctype>

#include "specscan/errors.hpp"

namespace specscan::xml {

const std::string* Element::find_attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(std::string_view s) const {
        return text_.compare(pos_, s.size(), s) == 0;
    }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void advance_by(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) advance();
    }

    void skip_whitespace() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line_, column_);
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '-' || c == '.';
}

std::string read_name(Cursor& cur) {
    if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected name");
    std::string name;
    while (!cur.eof() && is_name_char(cur.peek())) name += cur.advance();
    return name;
}

char resolve_entity(Cursor& cur) {
    // Cursor sits just past '&'.
    std::string entity;
    while (!cur.eof() && cur.peek() != ';') {
        entity += cur.advance();
        if (entity.size() > 8) cur.fail("unterminated entity reference");
    }
    if (cur.eof()) cur.fail("unterminated entity reference");
    cur.advance();  // ';'
    if (entity == "amp") return '&';
    if (entity == "lt") return '<';
    if (entity == "gt") return '>';
    if (entity == "quot") return '"';
    if (entity == "apos") return '\'';
    if (!entity.empty() && entity[0] == '#') {
        long code = 0;
        try {
            code = (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X'))
                       ? std::stol(entity.substr(2), nullptr, 16)
                       : std::stol(entity.substr(1), nullptr, 10);
        } catch (const std::exception&) {
            cur.fail("bad character reference '&" + entity + ";'");
        }
        if (code < 1 || code > 0x7F) cur.fail("unsupported character reference");
        return static_cast<char>(code);
    }
    cur.fail("unknown entity '&" + entity + ";'");
}

std::string read_attribute_value(Cursor& cur) {
    if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) {
        cur.fail("expected quoted attribute value");
    }
    const char quote = cur.advance();
    std::string value;
    while (true) {
        if (cur.eof()) cur.fail("unterminated attribute value");
        const char c = cur.peek();
        if (c == quote) {
            cur.advance();
            return value;
        }
        if (c == '<') cur.fail("'<' in attribute value");
        if (c == '&') {
            cur.advance();
            value += resolve_entity(cur);
        } else {
            value += cur.advance();
        }
    }
}

void skip_comment(Cursor& cur) {
    // Cursor sits on "<!--".
    cur.advance_by(4);
    while (!cur.starts_with("-->")) {
        if (cur.eof()) cur.fail("unterminated comment");
        cur.advance();
    }
    cur.advance_by(3);
}

void skip_misc(Cursor& cur) {
    while (true) {
        cur.skip_whitespace();
        if (cur.starts_with("<!--")) {
            skip_comment(cur);
        } else if (cur.starts_with("<?")) {
            while (!cur.starts_with("?>")) {
                if (cur.eof()) cur.fail("unterminated processing instruction");
                cur.advance();
            }
            cur.advance_by(2);
        } else {
            return;
        }
    }
}

Element parse_element(Cursor& cur) {
    if (cur.eof() || cur.peek() != '<') cur.fail("expected element");
    Element element;
    element.line = cur.line();
    element.column = cur.column();
    cur.advance();  // '<'
    element.name = read_name(cur);

    while (true) {
        cur.skip_whitespace();
        if (cur.eof()) cur.fail("unterminated start tag <" + element.name + ">");
        if (cur.peek() == '/') {
            cur.advance();
            if (cur.eof() || cur.peek() != '>') cur.fail("expected '>' after '/'");
            cur.advance();
            return element;
        }
        if (cur.peek() == '>') {
            cur.advance();
            break;
        }
        std::string key = read_name(cur);
        for (const auto& [existing, _] : element.attributes) {
            if (existing == key) cur.fail("duplicate attribute '" + key + "'");
        }
        cur.skip_whitespace();
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after attribute name");
        cur.advance();
        cur.skip_whitespace();
        element.attributes.emplace_back(std::move(key), read_attribute_value(cur));
    }

    // Content until the matching end tag.
    while (true) {
        if (cur.eof()) cur.fail("missing </" + element.name + ">");
        if (cur.starts_with("<!--")) {
            skip_comment(cur);
        } else if (cur.starts_with("</")) {
            cur.advance_by(2);
            const std::string closing = read_name(cur);
            if (closing != element.name) {
                cur.fail("mismatched end tag </" + closing + ">, expected </" +
                         element.name + ">");
            }
            cur.skip_whitespace();
            if (cur.eof() || cur.peek() != '>') cur.fail("expected '>'");
            cur.advance();
            return element;
        } else if (cur.peek() == '<') {
            element.children.push_back(parse_element(cur));
        } else if (cur.peek() == '&') {
            cur.advance();
            element.text += resolve_entity(cur);
        } else {
            element.text += cur.advance();
        }
    }
}

}  // namespace

Element parse_document(std::string_view text) {
    Cursor cur(text);
    skip_misc(cur);
    if (cur.eof()) cur.fail("document has no root element");
    Element root = parse_element(cur);
    skip_misc(cur);
    if (!cur.eof()) cur.fail("content after root element");
    return root;
}

std::string escape_attribute(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (const char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_text(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (const char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

Writer::Writer() : out_("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n") {}

void Writer::indent() {
    for (std::size_t i = 0; i < stack_.size(); ++i) out_ += "  ";
}

void Writer::open(std::string_view name,
                  const std::vector<std::pair<std::string, std::string>>& attributes) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attributes) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape_attribute(v);
        out_ += '"';
    }
    out_ += ">\n";
    stack_.emplace_back(name);
}

void Writer::self_closing(std::string_view name,
                          const std::vector<std::pair<std::string, std::string>>& attributes) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attributes) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape_attribute(v);
        out_ += '"';
    }
    out_ += "/>\n";
}

void Writer::close() {
    const std::string name = stack_.back();
    stack_.pop_back();
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
}

std::string Writer::str() const { return out_; }

}  // namespace specscan::xml
