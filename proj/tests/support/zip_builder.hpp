#pragma once

#include <string>
#include <utility>
#include <vector>

namespace testsupport {

// Writes a minimal ZIP archive (no data descriptors, no ZIP64).
struct ZipBuilder {
  struct Item {
    std::string name;
    std::string data;
    bool deflate;
  };
  std::vector<Item> items;

  ZipBuilder& add(std::string name, std::string data, bool deflate = true) {
    items.push_back({std::move(name), std::move(data), deflate});
    return *this;
  }
  std::string build() const;
};

}  // namespace testsupport
