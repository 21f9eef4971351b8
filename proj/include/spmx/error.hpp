#pragma once

#include <stdexcept>
#include <string>

namespace spmx {

enum class ErrorCode {
  // dtd
  DtdSyntax,
  NotSimpleDtd,
  // xslt
  XsltSyntax,
  UnsupportedConstruct,
  DuplicateRule,
  // ttree
  NoSuchElement,
  MissingRule,
  LeafMismatch,
  // spm streamability
  StarConstStar,
  OrderViolation,
  SharedStarChild,
  // stream / oracle
  MalformedXml,
  SchemaViolation,
  PathMismatch,
  // plumbing
  IoError,
};

const char* error_code_name(ErrorCode code);

// Streamability rejections map to CLI exit code 2, everything else to 1.
bool is_not_streamable(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spmx
