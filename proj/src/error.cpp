#include "spmx/error.hpp"

namespace spmx {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DtdSyntax: return "DtdSyntax";
    case ErrorCode::NotSimpleDtd: return "NotSimpleDtd";
    case ErrorCode::XsltSyntax: return "XsltSyntax";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::DuplicateRule: return "DuplicateRule";
    case ErrorCode::NoSuchElement: return "NoSuchElement";
    case ErrorCode::MissingRule: return "MissingRule";
    case ErrorCode::LeafMismatch: return "LeafMismatch";
    case ErrorCode::StarConstStar: return "StarConstStar";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::SharedStarChild: return "SharedStarChild";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::PathMismatch: return "PathMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

bool is_not_streamable(ErrorCode code) {
  return code == ErrorCode::StarConstStar || code == ErrorCode::OrderViolation ||
         code == ErrorCode::SharedStarChild;
}

}  // namespace spmx
