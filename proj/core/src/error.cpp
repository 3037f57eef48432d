#include "aact/error.hpp"

namespace aact {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kNumerical: return "numerical error";
    case ErrorKind::kInvalidTask: return "invalid task";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kData: return "data error";
  }
  return "error";
}

}  // namespace aact
