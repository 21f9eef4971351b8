#include <doctest.h>

#include "testutil.hpp"

using namespace spmx;

namespace {

ErrorCode code_of(const char* text) {
  try {
    parse_xslt(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse_xslt to throw for: ", text);
  return ErrorCode::IoError;
}

const TemplateRule& rule_for(const XsltProgram& p, const char* name) {
  const TemplateRule* r = p.rule_for(name);
  REQUIRE(r != nullptr);
  return *r;
}

}  // namespace

TEST_CASE("books stylesheet parses into five rules with merged constants") {
  const XsltProgram program = parse_xslt(testutil::kBooksXslt);
  REQUIRE(program.rules.size() == 5);

  const TemplateRule& root = program.root_rule();
  REQUIRE(root.items.size() == 3);
  CHECK(root.items[0].kind == ItemKind::Const);
  CHECK(root.items[0].text ==
        "<html><head><title>Books Information</title></head><body><table>");
  CHECK(root.items[1].kind == ItemKind::Apply);
  CHECK(root.items[1].select == std::vector<std::string>{"publication", "book"});
  CHECK(root.items[2].text == "</table></body></html>");

  const TemplateRule& book = rule_for(program, "book");
  REQUIRE(book.items.size() == 5);
  CHECK(book.items[0].text == "<tr><td>");
  CHECK(book.items[1].select == std::vector<std::string>{"title"});
  CHECK(book.items[2].text == "</td><td><table>");
  CHECK(book.items[3].select == std::vector<std::string>{"author"});
  CHECK(book.items[4].text == "</table></td></tr>");

  const TemplateRule& author = rule_for(program, "author");
  REQUIRE(author.items.size() == 3);
  CHECK(author.items[0].text == "<tr><td>");
  CHECK(author.items[1].select == std::vector<std::string>{"name"});
  CHECK(author.items[2].text == "</td></tr>");

  for (const char* leaf : {"title", "name"}) {
    const TemplateRule& r = rule_for(program, leaf);
    REQUIRE(r.items.size() == 1);
    CHECK(r.items[0].kind == ItemKind::ValueOfSelf);
  }
}

TEST_CASE("single text body becomes one constant") {
  const XsltProgram p = parse_xslt("<xsl:template match=\"/\">X</xsl:template>");
  REQUIRE(p.rules.size() == 1);
  REQUIRE(p.root_rule().items.size() == 1);
  CHECK(p.root_rule().items[0].kind == ItemKind::Const);
  CHECK(p.root_rule().items[0].text == "X");
}

TEST_CASE("stylesheet wrapper is optional") {
  const char* bare =
      "<xsl:template match=\"/\"><xsl:apply-templates select=\"a\"/></xsl:template>"
      "<xsl:template match=\"a\">x</xsl:template>";
  const std::string wrapped =
      std::string("<xsl:stylesheet version=\"1.0\" "
                  "xmlns:xsl=\"http://www.w3.org/1999/XSL/Transform\">") +
      bare + "</xsl:stylesheet>";
  const XsltProgram a = parse_xslt(bare);
  const XsltProgram b = parse_xslt(wrapped);
  REQUIRE(a.rules.size() == b.rules.size());
  CHECK(a.root_rule().items.size() == b.root_rule().items.size());
}

TEST_CASE("unsupported constructs are rejected") {
  CHECK(code_of("<xsl:template match=\"/\"><xsl:for-each select=\"a\">x</xsl:for-each>"
                "</xsl:template>") == ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"/\"><xsl:value-of select=\"a\"/></xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"a/b\">x</xsl:template>"
                "<xsl:template match=\"/\">y</xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"/\"><xsl:apply-templates/></xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"/\">"
                "<xsl:apply-templates select=\"a\" mode=\"m\"/></xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template name=\"t\">x</xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"/\" priority=\"2\">x</xsl:template>") ==
        ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"b\">x</xsl:template>") ==
        ErrorCode::UnsupportedConstruct);  // no root rule
  CHECK(code_of("<xsl:template match=\"/\"><xsl:apply-templates select=\"/a\"/>"
                "</xsl:template>") == ErrorCode::UnsupportedConstruct);
}

TEST_CASE("value-of rules allow one leading and one trailing constant only") {
  const XsltProgram ok = parse_xslt(
      "<xsl:template match=\"/\">a<xsl:value-of select=\".\"/>b</xsl:template>");
  REQUIRE(ok.root_rule().items.size() == 3);

  CHECK(code_of("<xsl:template match=\"/\">"
                "<xsl:value-of select=\".\"/><xsl:value-of select=\".\"/>"
                "</xsl:template>") == ErrorCode::UnsupportedConstruct);
  CHECK(code_of("<xsl:template match=\"/\">"
                "<xsl:value-of select=\".\"/><xsl:apply-templates select=\"a\"/>"
                "</xsl:template>") == ErrorCode::UnsupportedConstruct);
}

TEST_CASE("duplicate patterns are rejected") {
  CHECK(code_of("<xsl:template match=\"/\">a</xsl:template>"
                "<xsl:template match=\"/\">b</xsl:template>") == ErrorCode::DuplicateRule);
  CHECK(code_of("<xsl:template match=\"/\">a</xsl:template>"
                "<xsl:template match=\"b\">x</xsl:template>"
                "<xsl:template match=\"b\">y</xsl:template>") == ErrorCode::DuplicateRule);
}

TEST_CASE("malformed stylesheets are XsltSyntax") {
  CHECK(code_of("<xsl:template match=\"/\">x") == ErrorCode::XsltSyntax);
  CHECK(code_of("<xsl:template match=\"/\">x</xsl:wrong>") == ErrorCode::XsltSyntax);
  CHECK(code_of("stray <xsl:template match=\"/\">x</xsl:template>") ==
        ErrorCode::XsltSyntax);
  CHECK(code_of("<a]") == ErrorCode::XsltSyntax);
}

TEST_CASE("literal elements keep their attributes verbatim") {
  const XsltProgram p = parse_xslt(
      "<xsl:template match=\"/\"><td class='x'  align=\"left\">v</td></xsl:template>");
  REQUIRE(p.root_rule().items.size() == 1);
  CHECK(p.root_rule().items[0].text == "<td class='x'  align=\"left\">v</td>");
}

TEST_CASE("self-closing literals and entities stay as written") {
  const XsltProgram p = parse_xslt(
      "<xsl:template match=\"/\">a&amp;b<br/><hr />c</xsl:template>");
  REQUIRE(p.root_rule().items.size() == 1);
  CHECK(p.root_rule().items[0].text == "a&amp;b<br/><hr />c");
}

TEST_CASE("whitespace between instructions is dropped, inner text kept") {
  const XsltProgram p = parse_xslt(
      "<xsl:template match=\"/\">\n  <b>x y</b>\n  "
      "<xsl:apply-templates select=\"a\"/>\n  <i>z</i>\n</xsl:template>"
      "<xsl:template match=\"a\">q</xsl:template>");
  const auto& items = p.root_rule().items;
  REQUIRE(items.size() == 3);
  CHECK(items[0].text == "<b>x y</b>");
  CHECK(items[2].text == "<i>z</i>");
}

TEST_CASE("no accepted program has adjacent constants") {
  testutil::Rng rng(99);
  for (int i = 0; i < 60; ++i) {
    const DtdTree dtd = parse_dtd(testutil::random_dtd_text(rng));
    const XsltProgram p = parse_xslt(testutil::random_streamable_xslt(dtd, rng));
    for (const TemplateRule& r : p.rules) {
      for (size_t k = 1; k < r.items.size(); ++k) {
        const bool both_const = r.items[k - 1].kind == ItemKind::Const &&
                                r.items[k].kind == ItemKind::Const;
        CHECK(!both_const);
      }
      for (const OutputItem& item : r.items) {
        if (item.kind == ItemKind::Const) CHECK(!item.text.empty());
      }
    }
  }
}

TEST_CASE("minified bodies reproduce their markup exactly") {
  // With no whitespace to drop, concatenating constants and placeholders
  // rebuilds the body text.
  const char* body = "<b>head</b><xsl:apply-templates select=\"a/b\"/>tail"
                     "<xsl:value-of select=\".\"/>";
  (void)body;
  const std::string source =
      "<xsl:template match=\"/\"><b>head</b><xsl:apply-templates select=\"a/b\"/>tail"
      "</xsl:template>";
  const XsltProgram p = parse_xslt(source);
  std::string rebuilt;
  for (const auto& item : p.root_rule().items) {
    if (item.kind == ItemKind::Const) {
      rebuilt += item.text;
    } else if (item.kind == ItemKind::Apply) {
      rebuilt += "<xsl:apply-templates select=\"";
      for (size_t s = 0; s < item.select.size(); ++s) {
        if (s) rebuilt += '/';
        rebuilt += item.select[s];
      }
      rebuilt += "\"/>";
    }
  }
  CHECK(rebuilt == "<b>head</b><xsl:apply-templates select=\"a/b\"/>tail");
}

TEST_CASE("parsing is deterministic") {
  const XsltProgram a = parse_xslt(testutil::kBooksXslt);
  const XsltProgram b = parse_xslt(testutil::kBooksXslt);
  REQUIRE(a.rules.size() == b.rules.size());
  for (size_t i = 0; i < a.rules.size(); ++i) {
    CHECK(a.rules[i].pattern == b.rules[i].pattern);
    REQUIRE(a.rules[i].items.size() == b.rules[i].items.size());
    for (size_t k = 0; k < a.rules[i].items.size(); ++k) {
      CHECK(a.rules[i].items[k].kind == b.rules[i].items[k].kind);
      CHECK(a.rules[i].items[k].text == b.rules[i].items[k].text);
      CHECK(a.rules[i].items[k].select == b.rules[i].items[k].select);
    }
  }
}
