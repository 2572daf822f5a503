#pragma once

#include <filesystem>
#include <string>

namespace testsupport {

std::filesystem::path fixturesDir();
inline std::filesystem::path fixtureTree() { return fixturesDir() / "tree"; }
inline std::filesystem::path fixtureCache() { return fixturesDir() / "cache"; }

std::string readFile(const std::filesystem::path& path);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Four sample links: an image region, a slide shape, a text line and a
// selected element of a downloaded page.
inline constexpr const char* kRectLink =
    "/filesystem/pictures/a.png/content/to@image/rect@600,109,188,36";
inline constexpr const char* kSlideLink =
    "/filesystem/presentations/b.pptx/content/to@powerpoint/index@3/"
    "cssSelector@svg%2B%253E%2Bg%2B%253E%2Bg%253Anth-child%252843%2529";
inline constexpr const char* kLineLink = "/filesystem/c.txt/content/to@string/line@2";
inline constexpr const char* kDownloadLink =
    "/remote/download@http%253A%252F%252Fw3c.org,*%252F*/content/to@html/"
    "cssSelector@%2523w3c_nav%2520%253E%2520form%253Anth-child(2)%2520%253E%2520ul.main_nav"
    "%2520%253E%2520li%253Anth-child(2)%2520%253E%2520a";

}  // namespace testsupport
