#include <doctest.h>

#include "testutil.hpp"

using namespace spmx;

namespace {

// ---------------------------------------------------------------------------
// Brute-force placement enumeration: assigns every constant of a program to
// one event slot, tries every pcdata flag combination, and replays the event
// sequence of an instance. Used to show that rejected programs cannot be
// reproduced by any single-pass fragment table.
// ---------------------------------------------------------------------------

struct Slot {
  std::string start;
  std::string end_pre;
  std::string end_post;
  bool emit = false;
};

void replay(const DocNode& node, const std::map<std::string, Slot>& table, std::string& out) {
  const Slot& slot = table.at(node.name);
  out += slot.start;
  if (node.children.empty()) {
    out += slot.end_pre;
    if (slot.emit && node.text) {
      for (char c : *node.text) {
        switch (c) {
          case '&': out += "&amp;"; break;
          case '<': out += "&lt;"; break;
          case '>': out += "&gt;"; break;
          default: out += c;
        }
      }
    }
    out += slot.end_post;
    return;
  }
  for (const auto& child : node.children) replay(*child, table, out);
  out += slot.end_post;
}

std::vector<std::string> program_constants(const XsltProgram& program) {
  std::vector<std::string> consts;
  for (const auto& rule : program.rules) {
    for (const auto& item : rule.items) {
      if (item.kind == ItemKind::Const) consts.push_back(item.text);
    }
  }
  return consts;
}

// True when some placement reproduces the oracle output on every instance.
bool placement_exists(const DtdTree& dtd, const XsltProgram& program,
                      const std::vector<const DocNode*>& instances,
                      const std::vector<std::string>& expected) {
  const std::vector<std::string> consts = program_constants(program);
  std::vector<std::string> elements;
  std::vector<std::string> leaves;
  for (const auto& d : dtd.decls()) {
    elements.push_back(d.name);
    if (d.pcdata) leaves.push_back(d.name);
  }

  const size_t slot_count = elements.size() * 3;
  std::vector<size_t> assignment(consts.size(), 0);

  const auto matches = [&]() {
    for (uint32_t flags = 0; flags < (1u << leaves.size()); ++flags) {
      std::map<std::string, Slot> table;
      for (const auto& e : elements) table[e] = Slot{};
      for (size_t i = 0; i < consts.size(); ++i) {
        const size_t slot = assignment[i];
        Slot& s = table[elements[slot / 3]];
        switch (slot % 3) {
          case 0: s.start += consts[i]; break;
          case 1: s.end_pre += consts[i]; break;
          default: s.end_post += consts[i];
        }
      }
      for (size_t l = 0; l < leaves.size(); ++l) {
        table[leaves[l]].emit = (flags >> l) & 1;
      }
      bool all = true;
      for (size_t k = 0; k < instances.size() && all; ++k) {
        std::string out;
        replay(*instances[k], table, out);
        all = out == expected[k];
      }
      if (all) return true;
    }
    return false;
  };

  // odometer over const→slot assignments; constants sharing a slot keep
  // their enumeration order, so both orders of a pair are visited
  for (;;) {
    if (matches()) return true;
    size_t i = 0;
    for (; i < assignment.size(); ++i) {
      if (++assignment[i] < slot_count) break;
      assignment[i] = 0;
    }
    if (i == assignment.size()) return false;
  }
}

void check_rejected_and_unplaceable(const char* label, const std::string& dtd_text,
                                    const XsltProgram& program,
                                    const std::vector<std::string>& instance_xml) {
  CAPTURE(label);
  const DtdTree dtd = parse_dtd(dtd_text);

  bool rejected = false;
  try {
    convert(dtd, program);
  } catch (const Error& e) {
    rejected = is_not_streamable(e.code());
  }
  CHECK(rejected);

  std::vector<std::unique_ptr<DocNode>> docs;
  std::vector<const DocNode*> instances;
  std::vector<std::string> expected;
  for (const auto& xml : instance_xml) {
    docs.push_back(parse_document(xml));
    instances.push_back(docs.back().get());
    expected.push_back(transform_dom(program, dtd, *docs.back()));
  }
  CHECK(!placement_exists(dtd, program, instances, expected));
}

bool rule_output_varies(const XsltProgram& program, const TemplateRule& rule,
                        int depth = 0) {
  if (depth > 16) return false;
  for (const auto& item : rule.items) {
    if (item.kind == ItemKind::ValueOfSelf) return true;
    if (item.kind == ItemKind::Apply) {
      const TemplateRule* target = program.rule_for(item.select.back());
      if (target && rule_output_varies(program, *target, depth + 1)) return true;
    }
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Randomized differential suite
// ---------------------------------------------------------------------------

TEST_CASE("random triples: stream output equals the in-memory evaluation") {
  testutil::Rng rng(20260810);
  int diffed = 0;
  for (int i = 0; i < 150; ++i) {
    const std::string dtd_text = testutil::random_dtd_text(rng);
    const DtdTree dtd = parse_dtd(dtd_text);
    const std::string xslt_text = testutil::random_streamable_xslt(dtd, rng);
    CAPTURE(dtd_text);
    CAPTURE(xslt_text);

    const XsltProgram program = parse_xslt(xslt_text);
    const SpmModel model = convert(dtd, program);  // accepted by construction

    CHECK(testutil::fragment_chars(model) == testutil::reachable_const_chars(dtd, program));

    const std::string instance = testutil::small_instance(dtd, rng);

    const testutil::CheckedRun checked = testutil::run_stream_checked(model, instance);
    CHECK(checked.violation.empty());

    const auto doc = parse_document(instance);
    const std::string reference = transform_dom(program, dtd, *doc);
    CHECK(checked.output == reference);
    ++diffed;
  }
  CHECK(diffed == 150);
}

// ---------------------------------------------------------------------------
// Rejection soundness at desk scale
// ---------------------------------------------------------------------------

TEST_CASE("reversed pair: no placement reproduces the oracle") {
  check_rejected_and_unplaceable(
      "reversed-pair", testutil::kPairDtd, parse_xslt(testutil::kCaseBXslt),
      {"<A><B>b1</B><C>c1</C></A>", "<A><B>b2x</B><C>c2y</C></A>"});
}

TEST_CASE("shared repeated child: no placement reproduces the oracle") {
  check_rejected_and_unplaceable(
      "shared-star-child", testutil::kNestStarDtd, parse_xslt(testutil::kNestXslt),
      {"<A><B><C>x</C><D>y</D></B></A>",
       "<A><B><C>x1</C><D>y1</D></B><B><C>x2</C><D>y2</D></B></A>"});
}

TEST_CASE("constant between repeated selections: no placement reproduces the oracle") {
  check_rejected_and_unplaceable(
      "star-const-star", testutil::kStarConstStarDtd, parse_xslt(testutil::kStarConstStarXslt),
      {"<A><B>b1</B><C>c1</C></A>", "<A><B>b1</B><B>b2</B><C>c1</C><C>c2</C></A>"});
}

TEST_CASE("randomly mutated programs are rejected for a reason") {
  testutil::Rng rng(777);
  int verified = 0;
  for (int i = 0; i < 60 && verified < 12; ++i) {
    const std::string dtd_text = testutil::random_dtd_text(rng, 5);
    const DtdTree dtd = parse_dtd(dtd_text);
    const std::string xslt_text =
        testutil::random_streamable_xslt(dtd, rng, /*leaves_always_value_of=*/true);
    XsltProgram program = parse_xslt(xslt_text);

    // Swap the first two applies of a rule whose both subtrees emit pcdata,
    // then drop every constant so the placement space is just the flags.
    TemplateRule* victim = nullptr;
    size_t first = 0, second = 0;
    for (auto& rule : program.rules) {
      std::vector<size_t> applies;
      for (size_t k = 0; k < rule.items.size(); ++k) {
        if (rule.items[k].kind == ItemKind::Apply) applies.push_back(k);
      }
      if (applies.size() < 2) continue;
      const TemplateRule* t1 = program.rule_for(rule.items[applies[0]].select.back());
      const TemplateRule* t2 = program.rule_for(rule.items[applies[1]].select.back());
      if (!t1 || !t2) continue;
      if (!rule_output_varies(program, *t1) || !rule_output_varies(program, *t2)) continue;
      victim = &rule;
      first = applies[0];
      second = applies[1];
      break;
    }
    if (!victim) continue;
    std::swap(victim->items[first], victim->items[second]);
    for (auto& rule : program.rules) {
      std::erase_if(rule.items,
                    [](const OutputItem& item) { return item.kind == ItemKind::Const; });
    }

    // Several instances with different star counts and pcdata; a single
    // sample can miss the conflicting subtree entirely.
    std::vector<std::string> instances;
    for (int k = 0; k < 8; ++k) {
      GenConfig config;
      config.target_bytes = 1 + static_cast<uint64_t>(rng.below(120));
      config.seed = rng.seed();
      config.star_fanout = static_cast<uint32_t>(1 + k % 4);
      config.text_len = 3;
      const std::string doc = testutil::generate_to_string(dtd, config);
      if (doc.size() <= 2'000) instances.push_back(doc);
    }
    if (instances.size() < 4) continue;

    CAPTURE(dtd_text);
    CAPTURE(xslt_text);
    check_rejected_and_unplaceable("mutated", dtd_text, program, instances);
    ++verified;
  }
  CHECK(verified >= 5);
}
