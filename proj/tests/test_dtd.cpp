#include <doctest.h>

#include "testutil.hpp"

using namespace spmx;

namespace {

bool structurally_equal(const DtdTree& a, const DtdTree& b) {
  if (a.root() != b.root()) return false;
  if (a.decls().size() != b.decls().size()) return false;
  for (size_t i = 0; i < a.decls().size(); ++i) {
    const ElementDecl& da = a.decls()[i];
    const ElementDecl& db = b.decls()[i];
    if (da.name != db.name || da.pcdata != db.pcdata) return false;
    if (da.children.size() != db.children.size()) return false;
    for (size_t j = 0; j < da.children.size(); ++j) {
      if (da.children[j].name != db.children[j].name) return false;
      if (da.children[j].occurrence != db.children[j].occurrence) return false;
    }
  }
  return true;
}

ErrorCode code_of(const char* text) {
  try {
    parse_dtd(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse_dtd to throw for: ", text);
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("books DTD parses into the expected tree") {
  const DtdTree tree = parse_dtd(testutil::kBooksDtd);
  CHECK(tree.root() == "publication");

  const ElementDecl& pub = tree.decl("publication");
  REQUIRE(pub.children.size() == 1);
  CHECK(pub.children[0].name == "book");
  CHECK(pub.children[0].occurrence == Occurrence::Star);

  const ElementDecl& book = tree.decl("book");
  REQUIRE(book.children.size() == 3);
  CHECK(book.children[0].name == "title");
  CHECK(book.children[0].occurrence == Occurrence::One);
  CHECK(book.children[1].name == "isbn");
  CHECK(book.children[2].name == "author");
  CHECK(book.children[2].occurrence == Occurrence::Star);

  CHECK(tree.is_leaf("title"));
  CHECK(tree.is_leaf("isbn"));
  CHECK(tree.is_leaf("name"));
  CHECK(!tree.is_leaf("author"));
  CHECK(tree.decl("author").children.size() == 1);
  CHECK(tree.max_depth() == 4);
}

TEST_CASE("single pcdata element") {
  const DtdTree tree = parse_dtd("<!ELEMENT A (#PCDATA)>");
  CHECK(tree.root() == "A");
  CHECK(tree.is_leaf("A"));
  CHECK(tree.max_depth() == 1);
}

TEST_CASE("restriction violations are NotSimpleDtd") {
  CHECK(code_of("<!ELEMENT A (B)> <!ELEMENT B (A)>") == ErrorCode::NotSimpleDtd);  // cycle
  CHECK(code_of("<!ELEMENT A (B,C)> <!ELEMENT B (D)> <!ELEMENT C (D)> "
                "<!ELEMENT D (#PCDATA)>") == ErrorCode::NotSimpleDtd);  // two parents
  CHECK(code_of("<!ELEMENT A (B)>") == ErrorCode::NotSimpleDtd);        // undeclared child
  CHECK(code_of("<!ELEMENT A (#PCDATA)> <!ELEMENT B (#PCDATA)>") ==
        ErrorCode::NotSimpleDtd);  // two roots
  CHECK(code_of("<!ELEMENT A (B?)> <!ELEMENT B (#PCDATA)>") == ErrorCode::NotSimpleDtd);
  CHECK(code_of("<!ELEMENT A (B|C)> <!ELEMENT B (#PCDATA)> <!ELEMENT C (#PCDATA)>") ==
        ErrorCode::NotSimpleDtd);  // choice
  CHECK(code_of("<!ELEMENT A (#PCDATA|B)> <!ELEMENT B (#PCDATA)>") ==
        ErrorCode::NotSimpleDtd);  // mixed
  CHECK(code_of("<!ELEMENT A EMPTY>") == ErrorCode::NotSimpleDtd);
  CHECK(code_of("<!ELEMENT A ((B,C))> <!ELEMENT B (#PCDATA)> <!ELEMENT C (#PCDATA)>") ==
        ErrorCode::NotSimpleDtd);  // nested group
  CHECK(code_of("<!ELEMENT A (B,B)> <!ELEMENT B (#PCDATA)>") ==
        ErrorCode::NotSimpleDtd);  // duplicate child
  CHECK(code_of("<!ELEMENT A (#PCDATA)> <!ATTLIST A id ID #REQUIRED>") ==
        ErrorCode::NotSimpleDtd);
  CHECK(code_of("<!ENTITY x \"y\"> <!ELEMENT A (#PCDATA)>") == ErrorCode::NotSimpleDtd);
  CHECK(code_of("<!ELEMENT A (A)>") == ErrorCode::NotSimpleDtd);  // self cycle, no root
}

TEST_CASE("malformed declarations are DtdSyntax") {
  CHECK(code_of("") == ErrorCode::DtdSyntax);
  CHECK(code_of("<!ELEMENT A") == ErrorCode::DtdSyntax);
  CHECK(code_of("<!ELEMENT A #PCDATA>") == ErrorCode::DtdSyntax);
  CHECK(code_of("<!ELEMENT (B)>") == ErrorCode::DtdSyntax);
  CHECK(code_of("ELEMENT A (#PCDATA)") == ErrorCode::DtdSyntax);
  CHECK(code_of("<!ELEMENT A (#PCDATA)> <!ELEMENT A (#PCDATA)>") == ErrorCode::DtdSyntax);
  CHECK(code_of("<!ELEMENT A (#PCDATA)> <!-- unterminated") == ErrorCode::DtdSyntax);
}

TEST_CASE("plus collapses to star, comments are skipped") {
  const DtdTree tree = parse_dtd(
      "<!-- schema -->\n<!ELEMENT A (B+)>\n<!-- leaf --><!ELEMENT B (#PCDATA)>");
  CHECK(tree.decl("A").children[0].occurrence == Occurrence::Star);
}

TEST_CASE("serialize/parse round trip and brute-force shape checks") {
  testutil::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::string text = testutil::random_dtd_text(rng);
    const DtdTree tree = parse_dtd(text);
    CHECK(testutil::check_dtd_shape(tree).empty());

    const DtdTree again = parse_dtd(text);
    CHECK(structurally_equal(tree, again));  // determinism

    const DtdTree round = parse_dtd(serialize_dtd(tree));
    CHECK(structurally_equal(tree, round));
  }
}

TEST_CASE("books DTD round trips through its serialization") {
  const DtdTree tree = parse_dtd(testutil::kBooksDtd);
  CHECK(structurally_equal(tree, parse_dtd(serialize_dtd(tree))));
}
