// NEON variants of the byte-scan kernels (aarch64 baseline, no runtime check
// needed). Match positions are extracted with the vshrn narrowing trick: four
// mask bits per lane packed into a 64-bit scalar.

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

#include <bit>
#include <cstdint>

#include "spmx/scan.hpp"

namespace spmx::scan::detail {

namespace {

inline uint64_t mask64(uint8x16_t hit) {
  const uint8x8_t narrowed = vshrn_n_u16(vreinterpretq_u16_u8(hit), 4);
  return vget_lane_u64(vreinterpret_u64_u8(narrowed), 0);
}

}  // namespace

size_t find_byte_neon(const char* data, size_t n, char b) {
  const uint8x16_t needle = vdupq_n_u8(static_cast<uint8_t>(b));
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t v = vld1q_u8(reinterpret_cast<const uint8_t*>(data + i));
    const uint64_t mask = mask64(vceqq_u8(v, needle));
    if (mask) return i + (std::countr_zero(mask) >> 2);
  }
  for (; i < n; ++i) {
    if (data[i] == b) return i;
  }
  return n;
}

size_t find_markup_neon(const char* data, size_t n) {
  const uint8x16_t lt = vdupq_n_u8('<');
  const uint8x16_t amp = vdupq_n_u8('&');
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t v = vld1q_u8(reinterpret_cast<const uint8_t*>(data + i));
    const uint64_t mask = mask64(vorrq_u8(vceqq_u8(v, lt), vceqq_u8(v, amp)));
    if (mask) return i + (std::countr_zero(mask) >> 2);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c == '<' || c == '&') return i;
  }
  return n;
}

size_t find_escape_neon(const char* data, size_t n) {
  const uint8x16_t amp = vdupq_n_u8('&');
  const uint8x16_t lt = vdupq_n_u8('<');
  const uint8x16_t gt = vdupq_n_u8('>');
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t v = vld1q_u8(reinterpret_cast<const uint8_t*>(data + i));
    uint8x16_t hit = vorrq_u8(vceqq_u8(v, amp), vceqq_u8(v, lt));
    hit = vorrq_u8(hit, vceqq_u8(v, gt));
    const uint64_t mask = mask64(hit);
    if (mask) return i + (std::countr_zero(mask) >> 2);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c == '&' || c == '<' || c == '>') return i;
  }
  return n;
}

size_t find_non_space_neon(const char* data, size_t n) {
  const uint8x16_t sp = vdupq_n_u8(' ');
  const uint8x16_t tab = vdupq_n_u8('\t');
  const uint8x16_t cr = vdupq_n_u8('\r');
  const uint8x16_t lf = vdupq_n_u8('\n');
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t v = vld1q_u8(reinterpret_cast<const uint8_t*>(data + i));
    uint8x16_t ws = vorrq_u8(vceqq_u8(v, sp), vceqq_u8(v, tab));
    ws = vorrq_u8(ws, vorrq_u8(vceqq_u8(v, cr), vceqq_u8(v, lf)));
    const uint64_t mask = ~mask64(ws);
    if (mask) return i + (std::countr_zero(mask) >> 2);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return i;
  }
  return n;
}

}  // namespace spmx::scan::detail

#endif  // aarch64
