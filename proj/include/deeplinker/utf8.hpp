#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace deeplinker::utf8 {

// Decodes UTF-8, replacing every invalid or truncated sequence with U+FFFD.
// Never fails.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view codepoints);
void append(std::string& out, char32_t codepoint);

// Valid UTF-8 in, valid UTF-8 out; invalid input is repaired.
inline std::string sanitize(std::string_view bytes) { return encode(decode(bytes)); }

// Simple case fold covering ASCII, Latin-1, Greek and Cyrillic capitals.
std::string foldCase(std::string_view text);

}  // namespace deeplinker::utf8
