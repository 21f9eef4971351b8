#pragma once

#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "spmx/dtd.hpp"
#include "spmx/xslt.hpp"

namespace spmx {

struct TTNode;

// One step of a resolved select path: the node descended into and the
// occurrence of the DTD edge leading to it.
struct PathStep {
  TTNode* node = nullptr;
  Occurrence occurrence = Occurrence::One;
};

struct TTItem {
  enum class Kind { Const, Call, Pcdata };

  Kind kind = Kind::Const;
  std::string_view text;       // Const: points into the owning rule
  std::vector<PathStep> path;  // Call: first step .. target
  bool path_starred = false;   // Call: OR of Star over the whole path
  size_t item_index = 0;       // position within the rule's template

  const TTNode* first_step() const { return path.front().node; }
  const TTNode* target() const { return path.back().node; }
};

// DTD node extended with the rule matched to it and, for reachable rules,
// the resolved template items.
struct TTNode {
  const ElementDecl* decl = nullptr;
  TTNode* parent = nullptr;
  std::vector<PathStep> dtd_children;  // mirrors decl->children
  size_t index_in_parent = 0;

  const TemplateRule* rule = nullptr;
  std::vector<TTItem> items;  // resolved; populated for reachable rules only
  bool reachable = false;

  const std::string& element() const { return decl->name; }
  bool leaf() const { return decl->pcdata; }

  TTNode* child_by_name(std::string_view name) const {
    for (const PathStep& c : dtd_children) {
      if (c.node->decl->name == name) return c.node;
    }
    return nullptr;
  }
};

// Combines a DtdTree and an XsltProgram. Holds pointers into both, so they
// must outlive the tree. Immutable once built.
class TransformationTree {
 public:
  const TTNode& root() const { return *root_; }
  const std::deque<TTNode>& nodes() const { return nodes_; }
  const TTNode* find(std::string_view element) const;

  // Rules that resolved to a node the root rule never calls into.
  std::vector<const TemplateRule*> dead_rules() const;

 private:
  friend TransformationTree build_ttree(const DtdTree&, const XsltProgram&);
  std::deque<TTNode> nodes_;  // declaration order, stable addresses
  TTNode* root_ = nullptr;
};

// Resolves every rule's matched node and, walking the call closure from the
// root rule, every apply-templates select path. The root rule attaches to
// the DTD root element; its selects may consume one leading step equal to
// the root element's name.
TransformationTree build_ttree(const DtdTree& dtd, const XsltProgram& program);

// Indented text rendering for `compile --dump-ttree`.
std::string dump_ttree(const TransformationTree& tree);

}  // namespace spmx
