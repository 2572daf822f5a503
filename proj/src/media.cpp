#include "deeplinker/media.hpp"

#include "deeplinker/zip.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace deeplinker::media {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::uint32_t be16(std::string_view b, std::size_t at) {
  return (static_cast<std::uint8_t>(b[at]) << 8) | static_cast<std::uint8_t>(b[at + 1]);
}

std::uint32_t be32(std::string_view b, std::size_t at) {
  return (be16(b, at) << 16) | be16(b, at + 2);
}

std::uint32_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint8_t>(b[at]) | (static_cast<std::uint8_t>(b[at + 1]) << 8);
}

constexpr std::array<std::pair<std::string_view, std::string_view>, 22> kExtensions{{
    {"txt", "text/plain"},
    {"text", "text/plain"},
    {"md", "text/markdown"},
    {"csv", "text/csv"},
    {"log", "text/plain"},
    {"html", "text/html"},
    {"htm", "text/html"},
    {"xhtml", "application/xhtml+xml"},
    {"xml", "application/xml"},
    {"svg", "image/svg+xml"},
    {"json", "application/json"},
    {"ttl", "text/turtle"},
    {"nt", "application/n-triples"},
    {"css", "text/css"},
    {"js", "text/javascript"},
    {"png", "image/png"},
    {"jpg", "image/jpeg"},
    {"jpeg", "image/jpeg"},
    {"gif", "image/gif"},
    {"pdf", "application/pdf"},
    {"pptx", kPptx},
    {"zip", "application/zip"},
}};

}  // namespace

std::string forFileName(std::string_view name) {
  const auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return std::string(kOctetStream);
  const auto ext = lower(name.substr(dot + 1));
  for (const auto& [e, type] : kExtensions) {
    if (e == ext) return std::string(type);
  }
  return std::string(kOctetStream);
}

std::optional<std::string> sniffMagic(std::string_view bytes) {
  if (bytes.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8)) return "image/png";
  if (bytes.substr(0, 3) == "\xFF\xD8\xFF") return "image/jpeg";
  if (bytes.substr(0, 4) == "GIF8") return "image/gif";
  if (bytes.substr(0, 5) == "%PDF-") return "application/pdf";
  if (bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4)) {
    try {
      const ZipArchive zip(bytes);
      const auto& names = zip.names();
      const bool hasTypes = zip.contains("[Content_Types].xml");
      const bool hasPpt = std::any_of(names.begin(), names.end(),
                                      [](const std::string& n) { return n.rfind("ppt/", 0) == 0; });
      if (hasTypes && hasPpt) return std::string(kPptx);
    } catch (const ZipError&) {
    }
    return "application/zip";
  }
  return std::nullopt;
}

std::string sniff(std::string_view bytes, std::string_view fallback) {
  if (auto magic = sniffMagic(bytes)) return *magic;
  return fallback.empty() ? std::string(kOctetStream) : essence(fallback);
}

std::string essence(std::string_view mediaType) {
  auto semi = mediaType.find(';');
  auto head = mediaType.substr(0, semi);
  while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) head.remove_suffix(1);
  while (!head.empty() && std::isspace(static_cast<unsigned char>(head.front()))) head.remove_prefix(1);
  return lower(head);
}

bool isTextual(std::string_view mediaType) {
  const auto type = essence(mediaType);
  if (type.rfind("text/", 0) == 0) return true;
  if (type.size() > 4 && (type.ends_with("+xml") || type.ends_with("+json"))) return true;
  return type == "application/json" || type == "application/xml" ||
         type == "application/n-triples" || type == "application/javascript";
}

bool isImage(std::string_view mediaType) {
  const auto type = essence(mediaType);
  return type == "image/png" || type == "image/jpeg" || type == "image/gif";
}

std::optional<ImageInfo> readImageHeader(std::string_view b) {
  if (b.size() >= 24 && b.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8) &&
      b.substr(12, 4) == "IHDR") {
    return ImageInfo{"png", be32(b, 16), be32(b, 20)};
  }
  if (b.size() >= 10 && b.substr(0, 4) == "GIF8") {
    return ImageInfo{"gif", le16(b, 6), le16(b, 8)};
  }
  if (b.size() >= 4 && b.substr(0, 3) == "\xFF\xD8\xFF") {
    std::size_t i = 2;
    while (i + 4 <= b.size()) {
      if (static_cast<std::uint8_t>(b[i]) != 0xFF) return std::nullopt;
      const auto marker = static_cast<std::uint8_t>(b[i + 1]);
      if (marker == 0xFF) {  // fill byte
        ++i;
        continue;
      }
      if (marker == 0xD8 || marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) {
        i += 2;
        continue;
      }
      if (marker == 0xD9 || marker == 0xDA) return std::nullopt;  // EOI / SOS before SOF
      const auto length = be16(b, i + 2);
      const bool isSof = marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 &&
                         marker != 0xCC;
      if (isSof) {
        if (i + 9 > b.size()) return std::nullopt;
        return ImageInfo{"jpeg", be16(b, i + 7), be16(b, i + 5)};
      }
      i += 2 + length;
    }
  }
  return std::nullopt;
}

}  // namespace deeplinker::media
