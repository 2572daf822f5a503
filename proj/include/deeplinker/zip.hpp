#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deeplinker {

class ZipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Read-only view over an in-memory ZIP archive (stored and deflate entries,
// no ZIP64). The archive bytes must outlive the object.
class ZipArchive {
 public:
  static constexpr std::uint64_t kMaxEntrySize = 256ull << 20;

  explicit ZipArchive(std::string_view bytes);

  const std::vector<std::string>& names() const { return names_; }
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  // Inflates and CRC-checks one entry.
  std::string read(const std::string& name) const;

 private:
  struct Entry {
    std::uint16_t method;
    std::uint32_t crc;
    std::uint32_t compressedSize;
    std::uint32_t size;
    std::uint32_t localOffset;
  };

  std::string_view bytes_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> names_;
};

}  // namespace deeplinker
