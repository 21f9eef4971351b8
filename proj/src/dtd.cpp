#include "spmx/dtd.hpp"

#include <algorithm>
#include <unordered_set>

#include "spmx/scan.hpp"
#include "xml_names.hpp"

namespace spmx {

namespace {

using names::is_char;
using names::is_start;

class DtdParser {
 public:
  explicit DtdParser(std::string_view text) : text_(text) {}

  std::vector<ElementDecl> parse() {
    std::vector<ElementDecl> decls;
    for (;;) {
      skip_misc();
      if (pos_ >= text_.size()) break;
      decls.push_back(parse_element_decl());
    }
    if (decls.empty()) {
      throw Error(ErrorCode::DtdSyntax, "no element declarations found");
    }
    return decls;
  }

 private:
  void skip_ws() { pos_ += scan::find_non_space(text_.data() + pos_, text_.size() - pos_); }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (text_.compare(pos_, 4, "<!--") == 0) {
        const size_t end = text_.find("-->", pos_ + 4);
        if (end == std::string_view::npos) {
          throw Error(ErrorCode::DtdSyntax, "unterminated comment");
        }
        pos_ = end + 3;
        continue;
      }
      return;
    }
  }

  [[noreturn]] void fail_syntax(const std::string& what) {
    throw Error(ErrorCode::DtdSyntax, what + " at offset " + std::to_string(pos_));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c, const char* what) {
    if (peek() != c) fail_syntax(std::string("expected ") + what);
    ++pos_;
  }

  std::string read_name() {
    if (!is_start(peek())) fail_syntax("expected a name");
    const size_t start = pos_;
    while (pos_ < text_.size() && is_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  ElementDecl parse_element_decl() {
    if (text_.compare(pos_, 2, "<!") != 0) fail_syntax("expected a declaration");
    pos_ += 2;
    const std::string kind = read_name();
    if (kind != "ELEMENT") {
      if (kind == "ATTLIST") {
        throw Error(ErrorCode::NotSimpleDtd, "ATTLIST declarations are not supported");
      }
      if (kind == "ENTITY" || kind == "NOTATION") {
        throw Error(ErrorCode::NotSimpleDtd, kind + " declarations are not supported");
      }
      fail_syntax("unknown declaration <!" + kind);
    }
    if (!require_ws()) fail_syntax("expected whitespace after ELEMENT");
    ElementDecl decl;
    decl.name = read_name();
    if (!require_ws()) fail_syntax("expected whitespace after element name");
    parse_content(decl);
    skip_ws();
    expect('>', "'>' closing the declaration");
    return decl;
  }

  bool require_ws() {
    const size_t before = pos_;
    skip_ws();
    return pos_ > before;
  }

  void parse_content(ElementDecl& decl) {
    if (peek() != '(') {
      // EMPTY / ANY keywords fall outside the supported subset.
      if (is_start(peek())) {
        throw Error(ErrorCode::NotSimpleDtd,
                    "content model '" + read_name() + "' is not supported for element '" +
                        decl.name + "'");
      }
      fail_syntax("expected '(' starting the content model");
    }
    ++pos_;
    skip_ws();
    if (peek() == '#') {
      ++pos_;
      const std::string kw = read_name();
      if (kw != "PCDATA") fail_syntax("expected #PCDATA");
      skip_ws();
      if (peek() == '|') {
        throw Error(ErrorCode::NotSimpleDtd,
                    "mixed content is not supported (element '" + decl.name + "')");
      }
      expect(')', "')' closing (#PCDATA)");
      decl.pcdata = true;
      return;
    }
    for (;;) {
      skip_ws();
      if (peek() == '(') {
        throw Error(ErrorCode::NotSimpleDtd,
                    "nested groups are not supported (element '" + decl.name + "')");
      }
      ChildRef child;
      child.name = read_name();
      switch (peek()) {
        case '*':
        case '+':
          // At-least-once repetition places fragments exactly like
          // zero-or-more, so both collapse to Star.
          child.occurrence = Occurrence::Star;
          ++pos_;
          break;
        case '?':
          throw Error(ErrorCode::NotSimpleDtd,
                      "optional child '" + child.name + "?' is not supported");
        default:
          child.occurrence = Occurrence::One;
      }
      for (const auto& existing : decl.children) {
        if (existing.name == child.name) {
          throw Error(ErrorCode::NotSimpleDtd,
                      "child '" + child.name + "' declared twice under '" + decl.name + "'");
        }
      }
      decl.children.push_back(std::move(child));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '|') {
        throw Error(ErrorCode::NotSimpleDtd,
                    "choice content is not supported (element '" + decl.name + "')");
      }
      expect(')', "')' closing the content model");
      return;
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

DtdTree::DtdTree(std::string root, std::vector<ElementDecl> decls)
    : root_(std::move(root)), decls_(std::move(decls)) {
  index_.reserve(decls_.size());
  for (size_t i = 0; i < decls_.size(); ++i) {
    index_.emplace(decls_[i].name, i);
  }
}

const ElementDecl* DtdTree::find(std::string_view name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const ElementDecl& DtdTree::decl(std::string_view name) const {
  const ElementDecl* d = find(name);
  if (!d) {
    throw Error(ErrorCode::NoSuchElement, "element '" + std::string(name) + "' is not declared");
  }
  return *d;
}

size_t DtdTree::max_depth() const {
  size_t deepest = 0;
  // Non-recursive DFS; the tree is acyclic by construction.
  std::vector<std::pair<const ElementDecl*, size_t>> stack{{&decl(root_), 1}};
  while (!stack.empty()) {
    auto [d, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    for (const auto& c : d->children) {
      stack.emplace_back(&decl(c.name), depth + 1);
    }
  }
  return deepest;
}

DtdTree parse_dtd(std::string_view text) {
  std::vector<ElementDecl> decls = DtdParser(text).parse();

  std::unordered_map<std::string_view, size_t> index;
  for (size_t i = 0; i < decls.size(); ++i) {
    if (!index.emplace(decls[i].name, i).second) {
      throw Error(ErrorCode::DtdSyntax, "element '" + decls[i].name + "' declared twice");
    }
  }

  // Unique parent, single root.
  std::unordered_map<std::string_view, std::string_view> parent_of;
  for (const auto& d : decls) {
    for (const auto& c : d.children) {
      if (!index.count(c.name)) {
        throw Error(ErrorCode::NotSimpleDtd,
                    "child '" + c.name + "' of '" + d.name + "' has no declaration");
      }
      const auto [it, inserted] = parent_of.emplace(c.name, d.name);
      if (!inserted) {
        throw Error(ErrorCode::NotSimpleDtd,
                    "element '" + c.name + "' has two parents ('" + std::string(it->second) +
                        "' and '" + d.name + "')");
      }
    }
  }
  std::string root;
  for (const auto& d : decls) {
    if (parent_of.count(d.name)) continue;
    if (!root.empty()) {
      throw Error(ErrorCode::NotSimpleDtd,
                  "multiple roots: '" + root + "' and '" + d.name + "'");
    }
    root = d.name;
  }
  if (root.empty()) {
    throw Error(ErrorCode::NotSimpleDtd, "no root element: the declarations form a cycle");
  }

  // Acyclicity: with unique parents a cycle can only appear as a component
  // unreachable from the root.
  std::unordered_set<std::string_view> seen;
  std::vector<std::string_view> stack{root};
  while (!stack.empty()) {
    const std::string_view name = stack.back();
    stack.pop_back();
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::NotSimpleDtd, "cycle through element '" + std::string(name) + "'");
    }
    for (const auto& c : decls[index.at(name)].children) {
      stack.push_back(c.name);
    }
  }
  if (seen.size() != decls.size()) {
    for (const auto& d : decls) {
      if (!seen.count(d.name)) {
        throw Error(ErrorCode::NotSimpleDtd,
                    "element '" + d.name + "' is part of a cycle detached from the root");
      }
    }
  }

  return DtdTree(std::move(root), std::move(decls));
}

std::string serialize_dtd(const DtdTree& tree) {
  std::string out;
  for (const auto& d : tree.decls()) {
    out += "<!ELEMENT ";
    out += d.name;
    out += " (";
    if (d.pcdata) {
      out += "#PCDATA";
    } else {
      for (size_t i = 0; i < d.children.size(); ++i) {
        if (i) out += ", ";
        out += d.children[i].name;
        if (d.children[i].occurrence == Occurrence::Star) out += '*';
      }
    }
    out += ")>\n";
  }
  return out;
}

}  // namespace spmx
