#pragma once

#include <cstddef>

// Byte-scan kernels for the hot loops of the streaming tokenizer and the
// output escaper. Every finder returns the index of the first matching byte
// in [data, data+n), or n when there is none. The scalar kernels are the
// reference; SIMD variants are selected once at startup and must be
// byte-for-byte equivalent (see tests/test_scan.cpp).

namespace spmx::scan {

// first occurrence of byte b
size_t find_byte(const char* data, size_t n, char b);

// first '<' or '&' (character-data scanning)
size_t find_markup(const char* data, size_t n);

// first '&', '<' or '>' (output escaping)
size_t find_escape(const char* data, size_t n);

// first byte that is not XML whitespace (space, tab, CR, LF)
size_t find_non_space(const char* data, size_t n);

// Active backend: "avx2", "neon" or "scalar".
const char* backend_name();

// Pin the scalar reference kernels (equivalence tests, benchmarks).
void use_scalar(bool on);

namespace detail {

size_t find_byte_scalar(const char* data, size_t n, char b);
size_t find_markup_scalar(const char* data, size_t n);
size_t find_escape_scalar(const char* data, size_t n);
size_t find_non_space_scalar(const char* data, size_t n);

#if defined(__x86_64__) || defined(_M_X64)
size_t find_byte_avx2(const char* data, size_t n, char b);
size_t find_markup_avx2(const char* data, size_t n);
size_t find_escape_avx2(const char* data, size_t n);
size_t find_non_space_avx2(const char* data, size_t n);
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
size_t find_byte_neon(const char* data, size_t n, char b);
size_t find_markup_neon(const char* data, size_t n);
size_t find_escape_neon(const char* data, size_t n);
size_t find_non_space_neon(const char* data, size_t n);
#endif

}  // namespace detail

}  // namespace spmx::scan
