#include "spmx/ttree.hpp"

#include <unordered_map>

namespace spmx {

namespace {

std::string rule_label(const TemplateRule& rule) {
  return "rule match=\"" + rule.pattern.to_string() + "\"";
}

std::vector<TTItem> resolve_items(TTNode* n, const TTNode* root,
                                  std::vector<TTNode*>& newly_reached) {
  const TemplateRule& rule = *n->rule;
  std::vector<TTItem> items;
  items.reserve(rule.items.size());

  for (size_t idx = 0; idx < rule.items.size(); ++idx) {
    const OutputItem& item = rule.items[idx];
    TTItem out;
    out.item_index = idx;

    switch (item.kind) {
      case ItemKind::Const:
        out.kind = TTItem::Kind::Const;
        out.text = item.text;
        break;

      case ItemKind::ValueOfSelf:
        if (!n->leaf()) {
          throw Error(ErrorCode::LeafMismatch,
                      rule_label(rule) + " uses xsl:value-of but element '" + n->element() +
                          "' has element content");
        }
        out.kind = TTItem::Kind::Pcdata;
        break;

      case ItemKind::Apply: {
        out.kind = TTItem::Kind::Call;
        size_t s = 0;
        if (n == root && rule.pattern.is_root && item.select[0] == n->element()) {
          s = 1;  // leading step naming the root element itself
        }
        TTNode* cur = n;
        for (; s < item.select.size(); ++s) {
          TTNode* child = cur->child_by_name(item.select[s]);
          if (!child) {
            throw Error(ErrorCode::NoSuchElement,
                        rule_label(rule) + " item " + std::to_string(idx) + ": no child '" +
                            item.select[s] + "' under element '" + cur->element() + "'");
          }
          Occurrence occ = Occurrence::One;
          for (const PathStep& c : cur->dtd_children) {
            if (c.node == child) occ = c.occurrence;
          }
          out.path.push_back({child, occ});
          if (occ == Occurrence::Star) out.path_starred = true;
          cur = child;
        }
        if (out.path.empty()) {
          throw Error(ErrorCode::NoSuchElement,
                      rule_label(rule) + " item " + std::to_string(idx) +
                          ": select resolves to the matched element itself");
        }
        TTNode* target = out.path.back().node;
        if (!target->rule) {
          if (target->leaf()) {
            throw Error(ErrorCode::LeafMismatch,
                        rule_label(rule) + " item " + std::to_string(idx) +
                            ": #PCDATA element '" + target->element() + "' has no rule");
          }
          throw Error(ErrorCode::MissingRule,
                      "no rule for element '" + target->element() + "' selected by " +
                          rule_label(rule));
        }
        if (!target->reachable) {
          target->reachable = true;
          newly_reached.push_back(target);
        }
        break;
      }
    }
    items.push_back(std::move(out));
  }
  return items;
}

}  // namespace

const TTNode* TransformationTree::find(std::string_view element) const {
  for (const TTNode& n : nodes_) {
    if (n.decl->name == element) return &n;
  }
  return nullptr;
}

std::vector<const TemplateRule*> TransformationTree::dead_rules() const {
  std::vector<const TemplateRule*> dead;
  for (const TTNode& n : nodes_) {
    if (n.rule && !n.reachable) dead.push_back(n.rule);
  }
  return dead;
}

TransformationTree build_ttree(const DtdTree& dtd, const XsltProgram& program) {
  TransformationTree tree;

  std::unordered_map<std::string_view, TTNode*> by_name;
  for (const ElementDecl& decl : dtd.decls()) {
    TTNode& n = tree.nodes_.emplace_back();
    n.decl = &decl;
    by_name.emplace(decl.name, &n);
  }
  for (TTNode& n : tree.nodes_) {
    n.dtd_children.reserve(n.decl->children.size());
    for (size_t i = 0; i < n.decl->children.size(); ++i) {
      const ChildRef& c = n.decl->children[i];
      TTNode* child = by_name.at(c.name);
      child->parent = &n;
      child->index_in_parent = i;
      n.dtd_children.push_back({child, c.occurrence});
    }
  }
  tree.root_ = by_name.at(dtd.root());

  for (const TemplateRule& rule : program.rules) {
    TTNode* m;
    if (rule.pattern.is_root) {
      m = tree.root_;
    } else {
      const auto it = by_name.find(rule.pattern.element);
      if (it == by_name.end()) {
        throw Error(ErrorCode::NoSuchElement,
                    rule_label(rule) + ": element '" + rule.pattern.element +
                        "' is not declared in the DTD");
      }
      m = it->second;
    }
    if (m->rule) {
      throw Error(ErrorCode::DuplicateRule,
                  rule_label(*m->rule) + " and " + rule_label(rule) +
                      " both resolve to element '" + m->element() + "'");
    }
    m->rule = &rule;
  }

  // Call closure from the root rule; dead rules stay unresolved.
  tree.root_->reachable = true;
  std::vector<TTNode*> work{tree.root_};
  while (!work.empty()) {
    TTNode* n = work.back();
    work.pop_back();
    n->items = resolve_items(n, tree.root_, work);
  }
  return tree;
}

namespace {

std::string quoted_preview(std::string_view text) {
  std::string out = "\"";
  constexpr size_t kMax = 48;
  for (size_t i = 0; i < text.size() && i < kMax; ++i) {
    const char c = text[i];
    if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else if (c == '"') out += "\\\"";
    else out += c;
  }
  out += '"';
  if (text.size() > kMax) out += "...";
  return out;
}

void dump_node(const TTNode& n, Occurrence edge, int depth, std::string& out) {
  out.append(static_cast<size_t>(depth) * 2, ' ');
  if (edge == Occurrence::Star) out += "* ";
  out += n.element();
  if (n.leaf()) out += " (#PCDATA)";
  if (n.rule) {
    out += "  [match=\"" + n.rule->pattern.to_string() + "\"";
    if (!n.reachable) out += ", unreachable";
    out += "]";
  }
  out += '\n';
  for (const TTItem& item : n.items) {
    out.append(static_cast<size_t>(depth) * 2 + 4, ' ');
    switch (item.kind) {
      case TTItem::Kind::Const:
        out += "const " + quoted_preview(item.text);
        break;
      case TTItem::Kind::Pcdata:
        out += "value-of .";
        break;
      case TTItem::Kind::Call: {
        out += "apply -> ";
        for (size_t i = 0; i < item.path.size(); ++i) {
          if (i) out += '/';
          out += item.path[i].node->element();
        }
        if (item.path_starred) out += "  (starred)";
        break;
      }
    }
    out += '\n';
  }
  for (const PathStep& c : n.dtd_children) {
    dump_node(*c.node, c.occurrence, depth + 1, out);
  }
}

}  // namespace

std::string dump_ttree(const TransformationTree& tree) {
  std::string out;
  dump_node(tree.root(), Occurrence::One, 0, out);
  return out;
}

}  // namespace spmx
