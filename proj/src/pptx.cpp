#include "deeplinker/pptx.hpp"

#include "deeplinker/zip.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace deeplinker::pptx {

namespace {

std::string_view localName(std::string_view name) {
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

const XmlNode* child(const XmlNode& node, std::string_view local) {
  for (const auto& c : node.children) {
    if (c.isElement() && localName(c.name) == local) return &c;
  }
  return nullptr;
}

std::int64_t intAttribute(const XmlNode* node, std::string_view key) {
  if (!node) return 0;
  const auto* value = node->attribute(key);
  if (!value) return 0;
  std::int64_t out = 0;
  std::from_chars(value->data(), value->data() + value->size(), out);
  return out;
}

// Parses "ppt/slides/slide<N>.xml"; returns 0 for anything else.
std::size_t slideNumberOf(std::string_view part) {
  constexpr std::string_view kPrefix = "ppt/slides/slide";
  constexpr std::string_view kSuffix = ".xml";
  if (!part.starts_with(kPrefix) || !part.ends_with(kSuffix)) return 0;
  const auto digits = part.substr(kPrefix.size(), part.size() - kPrefix.size() - kSuffix.size());
  if (digits.empty()) return 0;
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  return ec == std::errc{} && ptr == digits.data() + digits.size() ? n : 0;
}

bool isShapeElement(std::string_view local) {
  return local == "sp" || local == "grpSp" || local == "pic" || local == "graphicFrame" ||
         local == "cxnSp";
}

void collectText(const XmlNode& node, std::string& out) {
  for (const auto& c : node.children) {
    if (!c.isElement()) continue;
    if (localName(c.name) == "t") out += c.textContent();
    else if (localName(c.name) == "br") out += '\n';
    else collectText(c, out);
  }
}

}  // namespace

Presentation loadPresentation(std::string_view bytes) {
  Presentation out;
  try {
    const ZipArchive zip(bytes);
    if (zip.contains("ppt/presentation.xml")) {
      const auto presentation = parseXml(zip.read("ppt/presentation.xml"));
      if (const auto* size = child(presentation, "sldSz")) {
        out.widthEmu = intAttribute(size, "cx");
        out.heightEmu = intAttribute(size, "cy");
      }
    }
    std::vector<std::pair<std::size_t, std::string>> parts;
    for (const auto& name : zip.names()) {
      if (const auto n = slideNumberOf(name)) parts.emplace_back(n, name);
    }
    if (parts.empty() && !zip.contains("ppt/presentation.xml")) {
      throw PptxError("archive has no presentation parts");
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& [n, name] : parts) {
      out.slides.push_back(
          SlidePart{name, std::make_shared<const XmlNode>(parseXml(zip.read(name)))});
    }
  } catch (const ZipError& e) {
    throw PptxError(e.what());
  } catch (const XmlParseError& e) {
    throw PptxError(std::string("malformed slide XML: ") + e.what());
  }
  return out;
}

std::vector<ShapeInfo> slideShapes(const XmlNode& slide) {
  const XmlNode* commonData = child(slide, "cSld");
  const XmlNode* tree = commonData ? child(*commonData, "spTree") : nullptr;
  if (!tree) return {};

  std::vector<ShapeInfo> shapes;
  for (const auto& node : tree->children) {
    if (!node.isElement() || !isShapeElement(localName(node.name))) continue;
    ShapeInfo shape;
    for (const auto& c : node.children) {
      const auto local = localName(c.name);
      if (c.isElement() && local.starts_with("nv") && local.ends_with("Pr")) {
        if (const auto* props = child(c, "cNvPr")) {
          if (const auto* name = props->attribute("name")) shape.name = *name;
        }
        break;
      }
    }
    const XmlNode* xfrm = nullptr;
    if (const auto* spPr = child(node, "spPr")) xfrm = child(*spPr, "xfrm");
    if (const auto* grpSpPr = child(node, "grpSpPr")) xfrm = child(*grpSpPr, "xfrm");
    if (!xfrm) xfrm = child(node, "xfrm");
    if (xfrm) {
      const auto* off = child(*xfrm, "off");
      const auto* ext = child(*xfrm, "ext");
      shape.x = intAttribute(off, "x");
      shape.y = intAttribute(off, "y");
      shape.width = intAttribute(ext, "cx");
      shape.height = intAttribute(ext, "cy");
    }
    if (const auto* body = child(node, "txBody")) {
      for (const auto& p : body->children) {
        if (!p.isElement() || localName(p.name) != "p") continue;
        std::string text;
        collectText(p, text);
        shape.paragraphs.push_back(std::move(text));
      }
    }
    shapes.push_back(std::move(shape));
  }
  return shapes;
}

std::string emuToPx(std::int64_t emu) {
  const double px = std::round(static_cast<double>(emu) / kEmuPerPixel * 1000.0) / 1000.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", px);
  std::string out(buf);
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  if (out == "-0") out = "0";
  return out;
}

XmlNode slideToSvg(const XmlNode& slide, std::size_t slideNumber, std::int64_t widthEmu,
                   std::int64_t heightEmu) {
  const auto width = emuToPx(widthEmu);
  const auto height = emuToPx(heightEmu);
  XmlNode svg = XmlNode::element("svg");
  svg.setAttribute("xmlns", "http://www.w3.org/2000/svg");
  svg.setAttribute("width", width);
  svg.setAttribute("height", height);
  svg.setAttribute("viewBox", "0 0 " + width + " " + height);

  XmlNode slideGroup = XmlNode::element("g");
  slideGroup.setAttribute("data-slide-number", std::to_string(slideNumber));
  for (const auto& shape : slideShapes(slide)) {
    XmlNode group = XmlNode::element("g");
    group.setAttribute("data-shape-name", shape.name);
    group.setAttribute("transform", "translate(" + emuToPx(shape.x) + "," + emuToPx(shape.y) + ")");
    XmlNode frame = XmlNode::element("rect");
    frame.setAttribute("width", emuToPx(shape.width));
    frame.setAttribute("height", emuToPx(shape.height));
    frame.setAttribute("fill", "none");
    group.children.push_back(std::move(frame));
    for (std::size_t i = 0; i < shape.paragraphs.size(); ++i) {
      XmlNode text = XmlNode::element("text");
      text.setAttribute("x", "0");
      text.setAttribute("y", std::to_string(18 * (i + 1)));
      text.children.push_back(XmlNode::textNode(shape.paragraphs[i]));
      group.children.push_back(std::move(text));
    }
    slideGroup.children.push_back(std::move(group));
  }
  svg.children.push_back(std::move(slideGroup));
  return svg;
}

}  // namespace deeplinker::pptx
