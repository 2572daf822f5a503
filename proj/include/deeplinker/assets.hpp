#pragma once

#include <span>
#include <string_view>

namespace deeplinker {

struct EmbeddedAsset {
  std::string_view name;
  std::string_view content;
};

// Static files compiled into the binary, served under /assets/.
std::span<const EmbeddedAsset> embeddedAssets();

}  // namespace deeplinker
