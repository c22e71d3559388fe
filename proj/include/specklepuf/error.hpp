#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specklepuf {

enum class ErrorCode {
  kParameter,
  kDimension,
  kUndefinedCorrelation,
  kNoIntersection,
  kConflict,
  kNotFound,
  kIo,
  kCapacity,
  kFormat,
};

/// Stable machine-readable name, used in CLI JSON error payloads.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define SPECKLEPUF_DEFINE_ERROR(Name, Code)                              \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
  };

SPECKLEPUF_DEFINE_ERROR(ParameterError, kParameter)
SPECKLEPUF_DEFINE_ERROR(DimensionError, kDimension)
SPECKLEPUF_DEFINE_ERROR(UndefinedCorrelationError, kUndefinedCorrelation)
SPECKLEPUF_DEFINE_ERROR(NoIntersectionError, kNoIntersection)
SPECKLEPUF_DEFINE_ERROR(ConflictError, kConflict)
SPECKLEPUF_DEFINE_ERROR(NotFoundError, kNotFound)
SPECKLEPUF_DEFINE_ERROR(IoError, kIo)
SPECKLEPUF_DEFINE_ERROR(CapacityError, kCapacity)
SPECKLEPUF_DEFINE_ERROR(FormatError, kFormat)

#undef SPECKLEPUF_DEFINE_ERROR

}  // namespace specklepuf
