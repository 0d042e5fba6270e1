#include <doctest.h>

#include "specscan/errors.hpp"
#include "specscan/xml.hpp"

using namespace specscan;

TEST_CASE("xml parses elements, attributes, and entities") {
    const auto root = xml::parse_document(
        "<?xml version=\"1.0\"?>\n"
        "<!-- header -->\n"
        "<index case=\"a &amp; b\">\n"
        "  <file path=\"x&lt;y.c\" lines=\"3\"/>\n"
        "  <file path=\"z.c\"><weakness cve=\"CVE-1\"/></file>\n"
        "</index>\n");
    CHECK(root.name == "index");
    REQUIRE(root.find_attribute("case") != nullptr);
    CHECK(*root.find_attribute("case") == "a & b");
    REQUIRE(root.children.size() == 2);
    CHECK(*root.children[0].find_attribute("path") == "x<y.c");
    CHECK(root.children[1].children.size() == 1);
    CHECK(root.find_attribute("missing") == nullptr);
}

TEST_CASE("xml reports line and column on malformed input") {
    try {
        xml::parse_document("<index>\n  <file path=oops/>\n</index>");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 1);
    }

    CHECK_THROWS_AS(xml::parse_document("<a><b></a>"), ParseError);
    CHECK_THROWS_AS(xml::parse_document("<a/><b/>"), ParseError);
    CHECK_THROWS_AS(xml::parse_document("  "), ParseError);
    CHECK_THROWS_AS(xml::parse_document("<a x=\"1\" x=\"2\"/>"), ParseError);
    CHECK_THROWS_AS(xml::parse_document("<a note=\"&bogus;\"/>"), ParseError);
}

TEST_CASE("xml writer escapes and round-trips") {
    xml::Writer writer;
    writer.open("root", {{"label", "a<b>&\"c"}});
    writer.self_closing("leaf", {{"v", "1"}});
    writer.close();
    const std::string text = writer.str();

    const auto parsed = xml::parse_document(text);
    CHECK(*parsed.find_attribute("label") == "a<b>&\"c");
    REQUIRE(parsed.children.size() == 1);
    CHECK(parsed.children[0].name == "leaf");
}
