#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace deeplinker::media {

inline constexpr std::string_view kOctetStream = "application/octet-stream";
inline constexpr std::string_view kDirectory = "inode/directory";
inline constexpr std::string_view kPptx =
    "application/vnd.openxmlformats-officedocument.presentationml.presentation";

// Extension table lookup; octet-stream when unknown.
std::string forFileName(std::string_view name);

// Magic-byte detection for PNG, JPEG, GIF, PDF and ZIP (refined to PPTX
// when the archive carries [Content_Types].xml and ppt/ parts).
std::optional<std::string> sniffMagic(std::string_view bytes);

// Magic bytes first, then `fallback` (an extension- or header-derived type).
std::string sniff(std::string_view bytes, std::string_view fallback);

// "text/html; charset=utf-8" -> "text/html", lower-cased.
std::string essence(std::string_view mediaType);

bool isTextual(std::string_view mediaType);
bool isImage(std::string_view mediaType);

struct ImageInfo {
  std::string format;  // png, jpeg, gif
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// Dimensions from the file header. nullopt when unrecognised or truncated.
std::optional<ImageInfo> readImageHeader(std::string_view bytes);

}  // namespace deeplinker::media
