#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spmx/error.hpp"

namespace spmx {

// Transparent hash so name maps accept string_view lookups.
struct NameHash {
  using is_transparent = void;
  size_t operator()(std::string_view sv) const { return std::hash<std::string_view>{}(sv); }
};

enum class Occurrence { One, Star };

struct ChildRef {
  std::string name;
  Occurrence occurrence = Occurrence::One;
};

// One <!ELEMENT> declaration: either a #PCDATA leaf or an ordered sequence
// of distinct child element types.
struct ElementDecl {
  std::string name;
  bool pcdata = false;
  std::vector<ChildRef> children;  // empty when pcdata

  const ChildRef* find_child(std::string_view child) const {
    for (const auto& c : children) {
      if (c.name == child) return &c;
    }
    return nullptr;
  }
};

// Tree view of a simple DTD: acyclic, every element type has exactly one
// parent, a single root. Immutable after construction.
class DtdTree {
 public:
  DtdTree(std::string root, std::vector<ElementDecl> decls);

  const std::string& root() const { return root_; }
  const std::vector<ElementDecl>& decls() const { return decls_; }

  const ElementDecl* find(std::string_view name) const;
  const ElementDecl& decl(std::string_view name) const;
  bool is_leaf(std::string_view name) const { return decl(name).pcdata; }

  // Longest root-to-leaf path, counting the root as depth 1.
  size_t max_depth() const;

 private:
  std::string root_;
  std::vector<ElementDecl> decls_;  // declaration order
  std::unordered_map<std::string, size_t, NameHash, std::equal_to<>> index_;
};

// Parses a restricted DTD external subset: <!ELEMENT> declarations with
// (#PCDATA) or sequence content, occurrence markers * and + (both mapped to
// Star) and bare names (One). `?`, choice, mixed content, ATTLIST, ENTITY
// and NOTATION declarations are rejected as NotSimpleDtd; malformed input
// as DtdSyntax.
DtdTree parse_dtd(std::string_view text);

// Declaration text that reparses to a structurally equal tree.
std::string serialize_dtd(const DtdTree& tree);

}  // namespace spmx
