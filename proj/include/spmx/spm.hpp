#pragma once

#include <map>
#include <string>
#include <string_view>

#include "spmx/dtd.hpp"
#include "spmx/xslt.hpp"

namespace spmx {

// Output fragments attached to one element type's events. The start fragment
// fires on element-start. On element-end a #PCDATA leaf emits
// end_pre + (escaped character data if emit_pcdata) + end_post; a non-leaf
// emits end_post only (end_pre stays empty).
struct EventActions {
  std::string start;
  std::string end_pre;
  bool emit_pcdata = false;
  std::string end_post;

  bool empty() const {
    return start.empty() && end_pre.empty() && end_post.empty() && !emit_pcdata;
  }
  friend bool operator==(const EventActions&, const EventActions&) = default;
};

using ActionTable = std::map<std::string, EventActions, std::less<>>;

// Compiled streaming model: one EventActions entry per element type of the
// DTD, plus the DTD itself for stream-time validation. Immutable; one model
// may serve many concurrent transforms.
class SpmModel {
 public:
  SpmModel(DtdTree dtd, ActionTable actions)
      : dtd_(std::move(dtd)), actions_(std::move(actions)) {}

  const std::string& root() const { return dtd_.root(); }
  const DtdTree& dtd() const { return dtd_; }
  const ActionTable& all_actions() const { return actions_; }

  const EventActions& actions(std::string_view element) const {
    const auto it = actions_.find(element);
    if (it == actions_.end()) {
      throw Error(ErrorCode::NoSuchElement,
                  "no actions for element '" + std::string(element) + "'");
    }
    return it->second;
  }

  // {"root": ..., "actions": {name: {start, endPre, emitPcdata, endPost}}},
  // element names sorted, 2-space indent, trailing newline.
  std::string to_json() const;

 private:
  DtdTree dtd_;
  ActionTable actions_;
};

// Builds the transformation tree and places every reachable constant string
// into a start/end fragment. Throws Error with one of the streamability
// codes (StarConstStar, OrderViolation, SharedStarChild) when no single-pass
// zero-buffer placement exists, and propagates ttree errors.
SpmModel convert(const DtdTree& dtd, const XsltProgram& program);

}  // namespace spmx
