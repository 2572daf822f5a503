#pragma once

#include "deeplinker/xml.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deeplinker::pptx {

// 1 px at 96 dpi.
inline constexpr double kEmuPerPixel = 9525.0;
// 16:9 default when ppt/presentation.xml carries no sldSz.
inline constexpr std::int64_t kDefaultSlideWidth = 12192000;
inline constexpr std::int64_t kDefaultSlideHeight = 6858000;

class PptxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SlidePart {
  std::string partName;  // e.g. ppt/slides/slide4.xml
  std::shared_ptr<const XmlNode> xml;
};

struct Presentation {
  std::int64_t widthEmu = kDefaultSlideWidth;
  std::int64_t heightEmu = kDefaultSlideHeight;
  // Ordered by the numeric suffix of ppt/slides/slideN.xml.
  std::vector<SlidePart> slides;
};

Presentation loadPresentation(std::string_view bytes);

struct ShapeInfo {
  std::string name;
  std::vector<std::string> paragraphs;
  std::int64_t x = 0, y = 0, width = 0, height = 0;  // EMU
};

// Top-level shapes of a slide's shape tree in document order.
std::vector<ShapeInfo> slideShapes(const XmlNode& slide);

// svg > g (the slide) > g per top-level shape, each carrying data-shape-name,
// a frame rect and one text element per paragraph.
XmlNode slideToSvg(const XmlNode& slide, std::size_t slideNumber, std::int64_t widthEmu,
                   std::int64_t heightEmu);

// EMU to px, at most three decimals, no trailing zeros.
std::string emuToPx(std::int64_t emu);

}  // namespace deeplinker::pptx
