#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include "spmx/io.hpp"
#include "spmx/spm.hpp"

namespace spmx {

enum class EventKind { ElementStart, ElementEnd };

struct TransformStats {
  uint64_t bytes_in = 0;
  uint64_t bytes_out = 0;
  uint64_t events = 0;
  // Max over time of open-element name bytes plus pending pcdata bytes, plus
  // the largest single fragment emitted. Depends on document depth and text
  // node length, not on document size.
  uint64_t peak_aux_bytes = 0;
};

struct StreamOptions {
  // Called after every element event. Pending output is flushed to the sink
  // before each call, so sinks observe event-aligned prefixes.
  std::function<void(EventKind, std::string_view element, uint64_t bytes_out)> event_hook;
};

// Single forward pass over `in`: fires element-start/element-end events and
// emits the model's fragments to `out`. Character data is buffered only for
// the currently open #PCDATA leaf and only when its emit_pcdata flag is set;
// everything else is discarded as read. Leaf pcdata is XML-escaped (& < >)
// on emission; fragments are emitted verbatim.
//
// Throws MalformedXml on well-formedness violations and SchemaViolation when
// an element is unknown to the DTD, appears under a parent that does not
// declare it, differs from the model root, or a non-leaf carries
// non-whitespace text.
TransformStats transform_stream(const SpmModel& model, ByteSource& in, ByteSink& out,
                                const StreamOptions* options = nullptr);

}  // namespace spmx
