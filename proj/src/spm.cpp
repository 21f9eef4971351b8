#include "spmx/spm.hpp"

#include <json.hpp>

#include "spmx/ttree.hpp"

namespace spmx {

namespace {

std::string rule_label(const TemplateRule& rule) {
  return "rule match=\"" + rule.pattern.to_string() + "\"";
}

// A template item as seen at one level of the descent: constants unchanged,
// calls reduced to the suffix of their select path below the current node.
struct Item {
  const TTItem* src = nullptr;
  size_t depth = 0;

  bool is_const() const { return src->kind == TTItem::Kind::Const; }
  std::string_view text() const { return src->text; }
  const PathStep& step() const { return src->path[depth]; }
  bool last_step() const { return depth + 1 == src->path.size(); }
  size_t index() const { return src->item_index; }
};

class SpmBuilder {
 public:
  ActionTable run(const TransformationTree& tree) {
    for (const TTNode& n : tree.nodes()) {
      table_.emplace(n.element(), EventActions{});
    }
    process_node(tree.root());
    return std::move(table_);
  }

 private:
  EventActions& act(const TTNode& n) { return table_.find(n.element())->second; }

  void process_node(const TTNode& n) {
    if (n.leaf()) {
      leaf_actions(n);
      return;
    }
    std::vector<Item> items;
    items.reserve(n.items.size());
    for (const TTItem& it : n.items) {
      items.push_back({&it, 0});
    }
    scan(n, items, *n.rule, /*rule_level=*/true);
    for (const TTItem& it : n.items) {
      if (it.kind == TTItem::Kind::Call) process_node(*it.target());
    }
  }

  // Leaf rules are Const? Pcdata? Const?. Around a value-of the constants
  // become the end tri-tuple halves; a rule that is a single constant keeps
  // the start placement of the leading-constant case. Anything a parent
  // already appended to end_post stays last.
  void leaf_actions(const TTNode& n) {
    EventActions& a = act(n);
    std::string lead, trail;
    bool emit = false;
    for (const TTItem& it : n.items) {
      if (it.kind == TTItem::Kind::Pcdata) {
        emit = true;
      } else {
        (emit ? trail : lead).append(it.text);
      }
    }
    a.emit_pcdata = emit;
    if (!emit) {
      a.start.append(lead);
      return;
    }
    a.end_pre = std::move(lead);
    a.end_post.insert(0, trail);
  }

  // Places the constants of one item sequence at node n. Calls are grouped
  // by the child they route through; a group over a non-repeated edge may
  // hold several calls, which are re-scanned one level down.
  void scan(const TTNode& n, const std::vector<Item>& items, const TemplateRule& rule,
            bool rule_level) {
    size_t i = 0;
    if (rule_level && !items.empty() && items[0].is_const()) {
      act(n).start.append(items[0].text());
      i = 1;
    }

    ptrdiff_t last_index = -1;
    while (i < items.size()) {
      const Item& head = items[i];
      const PathStep& head_step = head.step();
      const TTNode& child = *head_step.node;
      const auto child_index = static_cast<ptrdiff_t>(child.index_in_parent);
      if (child_index <= last_index) {
        throw Error(ErrorCode::OrderViolation,
                    rule_label(rule) + " item " + std::to_string(head.index()) +
                        ": selection of '" + child.element() +
                        "' does not follow the document order of '" + n.element() +
                        "' children");
      }
      last_index = child_index;

      // Group: consecutive calls through `child` plus the constants between
      // them. A constant not followed by another call through `child`
      // terminates the group and is placed below.
      std::vector<Item> group{head};
      size_t calls_in_group = 1;
      const Item* group_const = nullptr;
      size_t j = i + 1;
      while (j < items.size()) {
        if (items[j].is_const()) {
          if (j + 1 < items.size() && !items[j + 1].is_const() &&
              items[j + 1].step().node == &child) {
            group.push_back(items[j]);
            group.push_back(items[j + 1]);
            ++calls_in_group;
            j += 2;
          } else {
            group_const = &items[j];
            ++j;
            break;
          }
        } else if (items[j].step().node == &child) {
          group.push_back(items[j]);
          ++calls_in_group;
          ++j;
        } else {
          break;
        }
      }

      if (calls_in_group > 1) {
        if (head_step.occurrence == Occurrence::Star) {
          throw Error(ErrorCode::SharedStarChild,
                      rule_label(rule) + " items " + std::to_string(head.index()) + " and " +
                          std::to_string(group[1].src->item_index) +
                          " both route through repeated child '" + child.element() + "'");
        }
        std::vector<Item> sub;
        sub.reserve(group.size());
        for (const Item& g : group) {
          if (g.is_const()) {
            sub.push_back(g);
            continue;
          }
          if (g.last_step()) {
            throw Error(ErrorCode::SharedStarChild,
                        rule_label(rule) + " item " + std::to_string(g.index()) +
                            ": element '" + child.element() +
                            "' is selected while another item traverses it");
          }
          sub.push_back({g.src, g.depth + 1});
        }
        scan(child, sub, rule, /*rule_level=*/false);
      }

      if (group_const) {
        if (head_step.occurrence == Occurrence::One) {
          act(child).end_post.append(group_const->text());
        } else if (j < items.size()) {
          const PathStep& next_step = items[j].step();
          if (next_step.occurrence == Occurrence::Star) {
            throw Error(ErrorCode::StarConstStar,
                        rule_label(rule) + " item " + std::to_string(group_const->index()) +
                            ": constant sits between selections of repeated children '" +
                            child.element() + "' and '" + next_step.node->element() + "'");
          }
          act(*next_step.node).start.insert(0, group_const->text());
        } else {
          act(n).end_post.insert(0, group_const->text());
        }
      }
      i = j;
    }
  }

  ActionTable table_;
};

}  // namespace

std::string SpmModel::to_json() const {
  nlohmann::ordered_json actions = nlohmann::ordered_json::object();
  for (const auto& [name, a] : actions_) {
    actions[name] = {
        {"start", a.start},
        {"endPre", a.end_pre},
        {"emitPcdata", a.emit_pcdata},
        {"endPost", a.end_post},
    };
  }
  nlohmann::ordered_json j;
  j["root"] = root();
  j["actions"] = std::move(actions);
  return j.dump(2) + "\n";
}

SpmModel convert(const DtdTree& dtd, const XsltProgram& program) {
  const TransformationTree tree = build_ttree(dtd, program);
  ActionTable table = SpmBuilder().run(tree);
  return SpmModel(dtd, std::move(table));
}

}  // namespace spmx
