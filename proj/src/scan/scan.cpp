#include "spmx/scan.hpp"

#include <atomic>

namespace spmx::scan {

namespace detail {

size_t find_byte_scalar(const char* data, size_t n, char b) {
  for (size_t i = 0; i < n; ++i) {
    if (data[i] == b) return i;
  }
  return n;
}

size_t find_markup_scalar(const char* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const char c = data[i];
    if (c == '<' || c == '&') return i;
  }
  return n;
}

size_t find_escape_scalar(const char* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const char c = data[i];
    if (c == '&' || c == '<' || c == '>') return i;
  }
  return n;
}

size_t find_non_space_scalar(const char* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const char c = data[i];
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return i;
  }
  return n;
}

}  // namespace detail

namespace {

struct Kernels {
  size_t (*find_byte)(const char*, size_t, char);
  size_t (*find_markup)(const char*, size_t);
  size_t (*find_escape)(const char*, size_t);
  size_t (*find_non_space)(const char*, size_t);
  const char* name;
};

constexpr Kernels kScalar = {
    detail::find_byte_scalar,
    detail::find_markup_scalar,
    detail::find_escape_scalar,
    detail::find_non_space_scalar,
    "scalar",
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Kernels kAvx2 = {
    detail::find_byte_avx2,
    detail::find_markup_avx2,
    detail::find_escape_avx2,
    detail::find_non_space_avx2,
    "avx2",
};
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
constexpr Kernels kNeon = {
    detail::find_byte_neon,
    detail::find_markup_neon,
    detail::find_escape_neon,
    detail::find_non_space_neon,
    "neon",
};
#endif

const Kernels& best_kernels() {
#if defined(__x86_64__) || defined(_M_X64)
  static const Kernels& chosen = __builtin_cpu_supports("avx2") ? kAvx2 : kScalar;
  return chosen;
#elif defined(__aarch64__) || defined(_M_ARM64)
  return kNeon;
#else
  return kScalar;
#endif
}

std::atomic<const Kernels*> g_active{nullptr};

const Kernels& active() {
  const Kernels* k = g_active.load(std::memory_order_acquire);
  if (!k) {
    k = &best_kernels();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

}  // namespace

size_t find_byte(const char* data, size_t n, char b) { return active().find_byte(data, n, b); }
size_t find_markup(const char* data, size_t n) { return active().find_markup(data, n); }
size_t find_escape(const char* data, size_t n) { return active().find_escape(data, n); }
size_t find_non_space(const char* data, size_t n) { return active().find_non_space(data, n); }

const char* backend_name() { return active().name; }

void use_scalar(bool on) {
  g_active.store(on ? &kScalar : &best_kernels(), std::memory_order_release);
}

}  // namespace spmx::scan
