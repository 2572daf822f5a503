#include "deeplinker/link.hpp"

namespace deeplinker {

namespace {

constexpr char kHex[] = "0123456789ABCDEF";

bool isUnreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_' || c == '~';
}

int hexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Both decoding layers, with error offsets reported against the raw path.
std::string decodeParam(std::string_view raw, std::size_t offset) {
  try {
    return percentDecode(percentDecode(raw), /*plusAsSpace=*/true);
  } catch (const LinkError& e) {
    throw LinkError(LinkErrorCode::BadPercentEscape, offset, e.what());
  }
}

Segment parsePiece(std::string_view piece, std::size_t offset) {
  const auto at = piece.find('@');
  if (at == std::string_view::npos) {
    return childSegment(decodeParam(piece, offset));
  }
  const auto method = piece.substr(0, at);
  if (!isMethodName(method)) {
    throw LinkError(LinkErrorCode::BadMethodName, offset,
                    "invalid method name '" + std::string(method) + "'");
  }
  Segment segment{std::string(method), {}};
  std::size_t start = at + 1;
  while (true) {
    const auto comma = piece.find(',', start);
    const auto end = comma == std::string_view::npos ? piece.size() : comma;
    segment.params.push_back(
        decodeParam(piece.substr(start, end - start), offset + start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return segment;
}

}  // namespace

DeepLink DeepLink::prefix(std::size_t count) const {
  DeepLink out;
  out.segments.assign(segments.begin(),
                      segments.begin() + std::min(count, segments.size()));
  return out;
}

const char* toString(LinkErrorCode code) {
  switch (code) {
    case LinkErrorCode::EmptySegment: return "EmptySegment";
    case LinkErrorCode::BadMethodName: return "BadMethodName";
    case LinkErrorCode::BadPercentEscape: return "BadPercentEscape";
    case LinkErrorCode::NotAbsolute: return "NotAbsolute";
  }
  return "Unknown";
}

LinkError::LinkError(LinkErrorCode code, std::size_t position,
                     const std::string& detail)
    : std::runtime_error(detail), code_(code), position_(position) {}

bool isMethodName(std::string_view text) {
  if (text.empty()) return false;
  const auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
  };
  if (!alpha(text.front())) return false;
  for (char c : text) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

std::string percentEncode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (isUnreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string percentDecode(std::string_view text, bool plusAsSpace) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '%') {
      const int hi = i + 1 < text.size() ? hexValue(text[i + 1]) : -1;
      const int lo = i + 2 < text.size() ? hexValue(text[i + 2]) : -1;
      if (hi < 0 || lo < 0) {
        throw LinkError(LinkErrorCode::BadPercentEscape, i,
                        "malformed percent escape at offset " + std::to_string(i));
      }
      out += static_cast<char>(hi * 16 + lo);
      i += 2;
    } else if (c == '+' && plusAsSpace) {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

DeepLink parseDeepLink(std::string_view rawPath) {
  if (rawPath.empty() || rawPath.front() != '/') {
    throw LinkError(LinkErrorCode::NotAbsolute, 0, "deep link must start with '/'");
  }
  std::string_view body = rawPath.substr(1);
  if (!body.empty() && body.back() == '/') body.remove_suffix(1);
  if (body.empty()) {
    throw LinkError(LinkErrorCode::EmptySegment, 1, "deep link has no segments");
  }

  DeepLink link;
  std::size_t start = 0;
  while (true) {
    const auto slash = body.find('/', start);
    const auto end = slash == std::string_view::npos ? body.size() : slash;
    const auto piece = body.substr(start, end - start);
    if (piece.empty()) {
      throw LinkError(LinkErrorCode::EmptySegment, start + 1,
                      "empty segment at offset " + std::to_string(start + 1));
    }
    link.segments.push_back(parsePiece(piece, start + 1));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return link;
}

std::string serializeDeepLink(const DeepLink& link) {
  std::string out;
  for (const auto& segment : link.segments) {
    out += '/';
    const bool shorthand = segment.method == "child" &&
                           segment.params.size() == 1 &&
                           !segment.params.front().empty() &&
                           segment.params.front().find('@') == std::string::npos;
    if (!shorthand) {
      out += segment.method;
      out += '@';
    }
    for (std::size_t i = 0; i < segment.params.size(); ++i) {
      if (i > 0) out += ',';
      out += percentEncode(percentEncode(segment.params[i]));
    }
  }
  return out;
}

DeepLink appendSegment(const DeepLink& link, Segment segment) {
  DeepLink out = link;
  out.segments.push_back(std::move(segment));
  return out;
}

}  // namespace deeplinker
