#pragma once

#include "deeplinker/link.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Params mix reserved characters, spaces, '+', '%', non-ASCII and the empty
// string.
inline std::string randomParam(std::mt19937& rng) {
  static const std::vector<std::string> kPieces = {
      "/", ",", "@", "%", "%25", "%2F", " ", "+", "a", "Z", "0", "9", "-", "_", ".", "~",
      "ä", "ß", "€", "日本", "😀", "#", "?", "&", "=", "(", ")", ">", ":", "*", "\t", "'", "\""};
  std::string out;
  const int n = std::uniform_int_distribution<int>(0, 8)(rng);
  for (int i = 0; i < n; ++i) out += kPieces[rng() % kPieces.size()];
  return out;
}

inline std::string randomMethod(std::mt19937& rng) {
  static const std::vector<std::string> kMethods = {
      "child", "index", "to", "line", "substring", "rect", "cssSelector", "download", "property"};
  if (rng() % 4 != 0) return kMethods[rng() % kMethods.size()];
  static const std::string alpha = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  static const std::string alnum = alpha + "0123456789";
  std::string m(1, alpha[rng() % alpha.size()]);
  const int n = static_cast<int>(rng() % 8);
  for (int i = 0; i < n; ++i) m += alnum[rng() % alnum.size()];
  return m;
}

inline deeplinker::DeepLink randomLink(std::mt19937& rng) {
  deeplinker::DeepLink link;
  const int segments = std::uniform_int_distribution<int>(1, 8)(rng);
  for (int s = 0; s < segments; ++s) {
    deeplinker::Segment seg;
    seg.method = randomMethod(rng);
    const int params = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int p = 0; p < params; ++p) seg.params.push_back(randomParam(rng));
    link.segments.push_back(std::move(seg));
  }
  return link;
}

}  // namespace testsupport
