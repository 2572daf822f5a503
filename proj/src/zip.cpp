#include "deeplinker/zip.hpp"

#include <zlib.h>

namespace deeplinker {

namespace {

std::uint32_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint8_t>(b[at]) | (static_cast<std::uint8_t>(b[at + 1]) << 8);
}

std::uint32_t le32(std::string_view b, std::size_t at) {
  return le16(b, at) | (le16(b, at + 2) << 16);
}

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

std::string inflateRaw(std::string_view compressed, std::uint32_t expectedSize) {
  // One spare byte so an empty entry still has an output buffer.
  std::string out(std::size_t{expectedSize} + 1, '\0');
  z_stream stream{};
  if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) throw ZipError("inflateInit failed");
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  stream.avail_in = static_cast<uInt>(compressed.size());
  stream.next_out = reinterpret_cast<Bytef*>(out.data());
  stream.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&stream, Z_FINISH);
  const auto produced = stream.total_out;
  inflateEnd(&stream);
  if (rc != Z_STREAM_END || produced != expectedSize) throw ZipError("corrupt deflate stream");
  out.resize(expectedSize);
  return out;
}

}  // namespace

ZipArchive::ZipArchive(std::string_view bytes) : bytes_(bytes) {
  if (bytes.size() < 22) throw ZipError("too small to be a zip archive");
  const std::size_t searchFloor = bytes.size() > 22 + 0xFFFF ? bytes.size() - 22 - 0xFFFF : 0;
  std::size_t eocd = std::string_view::npos;
  for (std::size_t i = bytes.size() - 22 + 1; i-- > searchFloor;) {
    if (le32(bytes, i) == kEndOfCentralDir) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw ZipError("end of central directory not found");

  const std::uint32_t count = le16(bytes, eocd + 10);
  std::size_t at = le32(bytes, eocd + 16);
  for (std::uint32_t i = 0; i < count; ++i) {
    if (at + 46 > bytes.size() || le32(bytes, at) != kCentralHeader) {
      throw ZipError("corrupt central directory");
    }
    Entry entry{static_cast<std::uint16_t>(le16(bytes, at + 10)), le32(bytes, at + 16),
                le32(bytes, at + 20), le32(bytes, at + 24), le32(bytes, at + 42)};
    const auto nameLength = le16(bytes, at + 28);
    const auto extraLength = le16(bytes, at + 30);
    const auto commentLength = le16(bytes, at + 32);
    if (at + 46 + nameLength > bytes.size()) throw ZipError("corrupt central directory");
    std::string name(bytes.substr(at + 46, nameLength));
    if (entries_.emplace(name, entry).second) names_.push_back(std::move(name));
    at += 46 + nameLength + extraLength + commentLength;
  }
}

std::string ZipArchive::read(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw ZipError("no such entry: " + name);
  const Entry& e = it->second;
  if (e.size > kMaxEntrySize) throw ZipError("entry too large: " + name);
  if (std::size_t{e.localOffset} + 30 > bytes_.size() || le32(bytes_, e.localOffset) != kLocalHeader) {
    throw ZipError("corrupt local header: " + name);
  }
  const std::size_t dataStart =
      std::size_t{e.localOffset} + 30 + le16(bytes_, e.localOffset + 26) + le16(bytes_, e.localOffset + 28);
  if (dataStart + e.compressedSize > bytes_.size()) throw ZipError("truncated entry: " + name);
  const auto data = bytes_.substr(dataStart, e.compressedSize);

  std::string out;
  if (e.method == 0) {
    out.assign(data);
  } else if (e.method == 8) {
    out = inflateRaw(data, e.size);
  } else {
    throw ZipError("unsupported compression method " + std::to_string(e.method));
  }
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
  if (crc != e.crc) throw ZipError("crc mismatch: " + name);
  return out;
}

}  // namespace deeplinker
