#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchdist {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kIo,
  kBadMagic,
  kUnknownDtype,
  kTruncated,
  kDimensionOverflow,
  kFormat,
  kMultiChannel,
  kUnknownStrokeCode,
  kOverlappingStrokes,
  kSiteOutOfDomain,
  kEmptyAnnotation,
  kOutOfBounds,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; the code lets callers
// (the CLI in particular) classify the failure without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sketchdist
