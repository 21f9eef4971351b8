#pragma once

#include <cstdint>

#include "spmx/dtd.hpp"
#include "spmx/io.hpp"

namespace spmx {

struct GenConfig {
  uint64_t target_bytes = 1'000'000;
  uint64_t seed = 0;
  uint32_t star_fanout = 8;  // mean repetition count for Star children
  uint32_t text_len = 32;    // mean #PCDATA length in bytes
};

// Emits one valid instance of the DTD without ever materializing it: One
// children appear exactly once in declared order, Star children repeat with
// a geometric count around star_fanout, and the first Star edge in document
// order keeps repeating until target_bytes is reached (so the final size is
// target_bytes plus at most one subtree, when the DTD has a Star edge at
// all). Deterministic for a fixed (dtd, config). Returns bytes written.
uint64_t generate(const DtdTree& dtd, const GenConfig& config, ByteSink& out);

}  // namespace spmx
