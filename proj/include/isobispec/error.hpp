#pragma once

#include <stdexcept>
#include <string>

namespace isobispec {

enum class Errc {
  DelayOutOfRange,
  OutOfSupport,
  OffGrid,
  SupportMismatch,
  ZeroOperator,
  ConvergenceFailure,
  GridTooCoarseForRho,
  NoConvergence,
  LeftTrustRegion,
  ContourThroughZero,
  InvalidArgument,
  Io,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace isobispec
