#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spmx/dtd.hpp"
#include "spmx/xslt.hpp"

namespace spmx {

// In-memory document node. Leaves hold text, interior nodes hold children;
// never both.
struct DocNode {
  std::string name;
  std::vector<std::unique_ptr<DocNode>> children;
  std::optional<std::string> text;

  // Heap footprint estimate of the subtree, for the memory comparison
  // against the streaming engine.
  uint64_t footprint_bytes() const;
};

// Whole-document parser. Whitespace-only text between child elements is
// dropped; mixed content is rejected. Keeps its own scanning and entity
// handling so differential tests compare two independent paths.
std::unique_ptr<DocNode> parse_document(std::string_view xml);

// Direct recursive template application: Const emits its text, Apply
// navigates the select path and applies the target rule to every matched
// node in document order, ValueOfSelf emits the escaped leaf text. The DTD
// is consulted only to flag a missing step whose edge is One (PathMismatch).
std::string transform_dom(const XsltProgram& program, const DtdTree& dtd, const DocNode& doc);

}  // namespace spmx
