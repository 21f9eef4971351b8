// AVX2 variants of the byte-scan kernels. Compiled with -mavx2; selected at
// runtime only when the CPU reports AVX2 support.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "spmx/scan.hpp"

namespace spmx::scan::detail {

namespace {

inline size_t tail_find_byte(const char* data, size_t i, size_t n, char b) {
  for (; i < n; ++i) {
    if (data[i] == b) return i;
  }
  return n;
}

}  // namespace

size_t find_byte_avx2(const char* data, size_t n, char b) {
  const __m256i needle = _mm256_set1_epi8(b);
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    const uint32_t mask =
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, needle)));
    if (mask) return i + std::countr_zero(mask);
  }
  return tail_find_byte(data, i, n, b);
}

size_t find_markup_avx2(const char* data, size_t n) {
  const __m256i lt = _mm256_set1_epi8('<');
  const __m256i amp = _mm256_set1_epi8('&');
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    const __m256i hit =
        _mm256_or_si256(_mm256_cmpeq_epi8(v, lt), _mm256_cmpeq_epi8(v, amp));
    const uint32_t mask = static_cast<uint32_t>(_mm256_movemask_epi8(hit));
    if (mask) return i + std::countr_zero(mask);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c == '<' || c == '&') return i;
  }
  return n;
}

size_t find_escape_avx2(const char* data, size_t n) {
  const __m256i amp = _mm256_set1_epi8('&');
  const __m256i lt = _mm256_set1_epi8('<');
  const __m256i gt = _mm256_set1_epi8('>');
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    __m256i hit = _mm256_or_si256(_mm256_cmpeq_epi8(v, amp), _mm256_cmpeq_epi8(v, lt));
    hit = _mm256_or_si256(hit, _mm256_cmpeq_epi8(v, gt));
    const uint32_t mask = static_cast<uint32_t>(_mm256_movemask_epi8(hit));
    if (mask) return i + std::countr_zero(mask);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c == '&' || c == '<' || c == '>') return i;
  }
  return n;
}

size_t find_non_space_avx2(const char* data, size_t n) {
  const __m256i sp = _mm256_set1_epi8(' ');
  const __m256i tab = _mm256_set1_epi8('\t');
  const __m256i cr = _mm256_set1_epi8('\r');
  const __m256i lf = _mm256_set1_epi8('\n');
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    __m256i ws = _mm256_or_si256(_mm256_cmpeq_epi8(v, sp), _mm256_cmpeq_epi8(v, tab));
    ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, cr));
    ws = _mm256_or_si256(ws, _mm256_cmpeq_epi8(v, lf));
    const uint32_t mask = ~static_cast<uint32_t>(_mm256_movemask_epi8(ws));
    if (mask) return i + std::countr_zero(mask);
  }
  for (; i < n; ++i) {
    const char c = data[i];
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return i;
  }
  return n;
}

}  // namespace spmx::scan::detail

#endif  // x86_64
