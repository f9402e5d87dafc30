#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermalign {

enum class ErrorCode {
  InvalidTransform,
  EmptyInput,
  InvalidParameter,
  DegenerateSurface,
  EmptyOutput,
  NoCorrespondence,
  NoPlane,
  Divergence,
  InvalidSpec,
  DataFormat,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermalign
