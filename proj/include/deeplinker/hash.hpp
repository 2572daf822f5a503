#pragma once

#include <string>
#include <string_view>

namespace deeplinker {

// Lower-case hex SHA-256 digest.
std::string sha256Hex(std::string_view data);

// Standard alphabet with padding.
std::string base64Encode(std::string_view data);

}  // namespace deeplinker
