#include "specklepuf/error.hpp"

namespace specklepuf {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParameter: return "parameter_error";
    case ErrorCode::kDimension: return "dimension_error";
    case ErrorCode::kUndefinedCorrelation: return "undefined_correlation_error";
    case ErrorCode::kNoIntersection: return "no_intersection_error";
    case ErrorCode::kConflict: return "conflict_error";
    case ErrorCode::kNotFound: return "not_found_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kCapacity: return "capacity_error";
    case ErrorCode::kFormat: return "format_error";
  }
  return "unknown";
}

}  // namespace specklepuf
