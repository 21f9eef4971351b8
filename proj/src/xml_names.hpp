#pragma once

#include <string_view>

// Shared name-character classes (ASCII subset of XML NCName).

namespace spmx::names {

inline bool is_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

inline bool is_char(char c) {
  return is_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline bool is_ncname(std::string_view s) {
  if (s.empty() || !is_start(s[0])) return false;
  for (char c : s.substr(1)) {
    if (!is_char(c)) return false;
  }
  return true;
}

}  // namespace spmx::names
