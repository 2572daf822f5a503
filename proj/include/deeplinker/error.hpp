#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deeplinker {

enum class ResolveErrorCode {
  UnknownMethod,
  UnsupportedMethodForKind,
  NotFound,
  IndexOutOfRange,
  BadParamCount,
  BadParamFormat,
  PathEscapesRoot,
  ConversionUnavailable,
  DownloadFailed,
  SelectorNoMatch,
};

const char* toString(ResolveErrorCode code);

// Raised by resolution steps and converters. The resolver stamps the index of
// the failing segment before the error leaves `Resolver::resolve`.
class ResolveError : public std::runtime_error {
 public:
  ResolveError(ResolveErrorCode code, const std::string& detail,
               std::size_t atSegment = 0)
      : std::runtime_error(detail), code_(code), atSegment_(atSegment) {}

  ResolveErrorCode code() const { return code_; }
  std::size_t atSegment() const { return atSegment_; }
  void setAtSegment(std::size_t index) { atSegment_ = index; }

 private:
  ResolveErrorCode code_;
  std::size_t atSegment_;
};

}  // namespace deeplinker
