#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spmx/error.hpp"

namespace spmx {

// match="/" or match="name"
struct MatchPattern {
  bool is_root = false;
  std::string element;  // empty when is_root

  std::string to_string() const { return is_root ? "/" : element; }
  friend bool operator==(const MatchPattern&, const MatchPattern&) = default;
};

enum class ItemKind { Const, Apply, ValueOfSelf };

struct OutputItem {
  ItemKind kind = ItemKind::Const;
  std::string text;                  // Const: output bytes, emitted verbatim
  std::vector<std::string> select;   // Apply: child-axis steps

  static OutputItem make_const(std::string t) {
    return {ItemKind::Const, std::move(t), {}};
  }
  static OutputItem make_apply(std::vector<std::string> steps) {
    return {ItemKind::Apply, {}, std::move(steps)};
  }
  static OutputItem value_of_self() { return {ItemKind::ValueOfSelf, {}, {}}; }
};

struct TemplateRule {
  MatchPattern pattern;
  std::vector<OutputItem> items;  // adjacent Consts merged at parse time

  bool has_value_of_self() const {
    for (const auto& it : items) {
      if (it.kind == ItemKind::ValueOfSelf) return true;
    }
    return false;
  }
};

// Parsed stylesheet: an ordered rule set with exactly one root rule and at
// most one rule per pattern. Immutable after construction.
struct XsltProgram {
  std::vector<TemplateRule> rules;

  const TemplateRule& root_rule() const;
  const TemplateRule* rule_for(std::string_view element) const;
};

// Accepts a bare list of xsl:template elements or a single
// xsl:stylesheet/xsl:transform wrapper around one. Literal result content is
// captured verbatim as Const items; whitespace-only text between nodes is
// dropped. Instructions other than template/apply-templates/value-of, value-of
// with select != ".", match patterns other than "/" or a single name, and
// mode/priority/name attributes are rejected as UnsupportedConstruct.
XsltProgram parse_xslt(std::string_view text);

}  // namespace spmx
