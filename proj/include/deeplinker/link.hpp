#pragma once

// Deep-link path grammar.
//
//   path      = "/" segment *( "/" segment ) [ "/" ]
//   segment   = method "@" params | shorthand
//   method    = ALPHA *( ALPHA / DIGIT )
//   params    = param *( "," param )
//   shorthand = param                 ; same as "child@" param
//
// Splitting on "/", "@" and "," happens on the raw wire text. Every param is
// then percent-decoded twice: once for the URI layer and once for the
// parameter layer. The parameter layer also reads "+" as a space, which is
// how form-encoded selectors such as "svg+%3E+g" arrive.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deeplinker {

struct Segment {
  std::string method;
  std::vector<std::string> params;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct DeepLink {
  std::vector<Segment> segments;

  friend bool operator==(const DeepLink&, const DeepLink&) = default;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }

  // Copy of the first `count` segments.
  DeepLink prefix(std::size_t count) const;
};

enum class LinkErrorCode {
  EmptySegment,
  BadMethodName,
  BadPercentEscape,
  NotAbsolute,
};

const char* toString(LinkErrorCode code);

class LinkError : public std::runtime_error {
 public:
  LinkError(LinkErrorCode code, std::size_t position, const std::string& detail);

  LinkErrorCode code() const { return code_; }
  // Byte offset into the raw path where the problem was detected.
  std::size_t position() const { return position_; }

 private:
  LinkErrorCode code_;
  std::size_t position_;
};

bool isMethodName(std::string_view text);

// One encoding pass: every byte outside the RFC 3986 unreserved set becomes
// %XX (upper-case hex).
std::string percentEncode(std::string_view text);

// One decoding pass. Throws LinkError(BadPercentEscape) on a malformed escape.
std::string percentDecode(std::string_view text, bool plusAsSpace = false);

DeepLink parseDeepLink(std::string_view rawPath);
std::string serializeDeepLink(const DeepLink& link);
DeepLink appendSegment(const DeepLink& link, Segment segment);

// Shorthand for a single-param `child` segment.
inline Segment childSegment(std::string name) {
  return Segment{"child", {std::move(name)}};
}

}  // namespace deeplinker
