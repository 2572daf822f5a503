#include "deeplinker/convert.hpp"

#include "deeplinker/media.hpp"
#include "deeplinker/utf8.hpp"

#include <algorithm>
#include <cctype>

namespace deeplinker {

namespace {

[[noreturn]] void unavailable(const std::string& detail) {
  throw ResolveError(ResolveErrorCode::ConversionUnavailable, detail);
}

[[noreturn]] void badPayload(const std::string& detail) {
  throw ResolveError(ResolveErrorCode::BadParamFormat, detail);
}

bool looksTextual(const BinaryPayload& binary) {
  if (media::isTextual(binary.mediaType)) return true;
  if (binary.mediaType != media::kOctetStream) return false;
  const auto head = std::string_view(*binary.bytes).substr(0, 8192);
  return head.find('\0') == std::string_view::npos;
}

bool isHtmlType(const std::string& type) {
  return type == "text/html" || type == "application/xhtml+xml";
}

bool isXmlType(const std::string& type) {
  return type == "application/xml" || type == "text/xml" || type.ends_with("+xml");
}

bool isJsonType(const std::string& type) {
  return type == "application/json" || type.ends_with("+json");
}

bool isRdfType(const std::string& type) {
  return type == "text/turtle" || type == "application/n-triples";
}

Resource parseText(std::string_view text, std::string_view format) {
  if (format == "json") {
    try {
      return JsonPayload{nlohmann::ordered_json::parse(text)};
    } catch (const nlohmann::json::parse_error& e) {
      badPayload(std::string("invalid JSON: ") + e.what());
    }
  }
  if (format == "xml") {
    try {
      return XmlishPayload::wrap(parseXml(text), XmlMode::Xml, XmlOrigin::Source);
    } catch (const XmlParseError& e) {
      badPayload(std::string("invalid XML: ") + e.what());
    }
  }
  if (format == "html") {
    return XmlishPayload::wrap(parseHtml(text), XmlMode::Html, XmlOrigin::Source);
  }
  if (format == "rdf") {
    try {
      return RdfPayload{rdf::parseTurtle(text)};
    } catch (const rdf::RdfParseError& e) {
      badPayload(std::string("invalid Turtle: ") + e.what());
    }
  }
  unavailable("no text conversion to '" + std::string(format) + "'");
}

Resource fromBinary(const BinaryPayload& binary, std::string_view format) {
  const auto& type = binary.mediaType;
  const std::string_view bytes = *binary.bytes;
  if (format == "binary") return binary;
  if (format == "string") return textResource(utf8::sanitize(bytes));
  if (format == "image") {
    if (!media::isImage(type)) unavailable("source is " + type + ", not an image");
    const auto info = media::readImageHeader(bytes);
    if (!info) badPayload("unreadable image header");
    return ImagePayload{info->format, type, info->width, info->height, binary.bytes};
  }
  if (format == "pdf") {
    if (type != "application/pdf") unavailable("source is " + type + ", not PDF");
    const auto eol = bytes.find_first_of("\r\n");
    const auto header = bytes.substr(0, std::min<std::size_t>(eol, 32));
    if (!header.starts_with("%PDF-")) badPayload("missing %PDF- header");
    return PdfPayload{std::string(header.substr(5)), estimatePdfPages(bytes), binary.bytes};
  }
  if (format == "powerpoint") {
    if (type != media::kPptx) unavailable("source is " + type + ", not a presentation");
    try {
      return PowerpointPayload{
          std::make_shared<const pptx::Presentation>(pptx::loadPresentation(bytes)), binary.bytes};
    } catch (const pptx::PptxError& e) {
      badPayload(e.what());
    }
  }
  if (!looksTextual(binary)) unavailable("source is " + type + ", not text");
  return parseText(utf8::sanitize(bytes), format);
}

Bytes byteSource(const Resource& resource) {
  if (const auto* p = resource.get<ImagePayload>()) return p->bytes;
  if (const auto* p = resource.get<PdfPayload>()) return p->bytes;
  if (const auto* p = resource.get<PowerpointPayload>()) return p->bytes;
  if (const auto* p = resource.get<BinaryPayload>()) return p->bytes;
  if (const auto* p = resource.get<TextPayload>()) return std::make_shared<const std::string>(p->text);
  return nullptr;
}

std::string mediaTypeOf(const Resource& resource) {
  switch (resource.kind()) {
    case ResourceKind::Image: return resource.as<ImagePayload>().mediaType;
    case ResourceKind::Pdf: return "application/pdf";
    case ResourceKind::Powerpoint: return std::string(media::kPptx);
    case ResourceKind::Binary: return resource.as<BinaryPayload>().mediaType;
    default: return "text/plain";
  }
}

}  // namespace

bool isConversionRegistered(ResourceKind kind, std::string_view format) {
  switch (kind) {
    case ResourceKind::Binary:
      return format != "svg" &&
             std::find(kConversionFormats.begin(), kConversionFormats.end(), format) !=
                 kConversionFormats.end();
    case ResourceKind::String:
      return format == "json" || format == "xml" || format == "html" || format == "rdf" ||
             format == "binary";
    case ResourceKind::PowerpointSlide:
      return format == "xml" || format == "svg";
    case ResourceKind::Image:
    case ResourceKind::Pdf:
    case ResourceKind::Powerpoint:
      return format == "binary";
    default:
      return false;
  }
}

Resource convert(const Resource& resource, std::string_view format) {
  if (!isConversionRegistered(resource.kind(), format)) {
    unavailable(std::string(toString(resource.kind())) + " cannot be converted to '" +
                std::string(format) + "'");
  }
  if (format == "binary") {
    return BinaryPayload{byteSource(resource), mediaTypeOf(resource)};
  }
  switch (resource.kind()) {
    case ResourceKind::Binary:
      return fromBinary(resource.as<BinaryPayload>(), format);
    case ResourceKind::String:
      return parseText(resource.as<TextPayload>().text, format);
    case ResourceKind::PowerpointSlide: {
      const auto& slide = resource.as<SlidePayload>();
      if (format == "svg") return slideSvgResource(slide);
      return XmlishPayload::wrap(slide.xml(), XmlMode::Xml, XmlOrigin::Source);
    }
    default:
      unavailable("unreachable conversion");
  }
}

std::vector<std::string> listedConversions(const Resource& resource) {
  if (resource.kind() == ResourceKind::PowerpointSlide) return {"svg", "xml"};
  const auto* binary = resource.get<BinaryPayload>();
  if (!binary) return {};
  const auto type = media::essence(binary->mediaType);
  std::vector<std::string> out;
  if (looksTextual(*binary)) {
    out.emplace_back("string");
    if (isJsonType(type)) out.emplace_back("json");
    if (isHtmlType(type)) out.emplace_back("html");
    if (isXmlType(type)) out.emplace_back("xml");
    if (isRdfType(type)) out.emplace_back("rdf");
  }
  if (media::isImage(type)) out.emplace_back("image");
  if (type == "application/pdf") out.emplace_back("pdf");
  if (type == media::kPptx) out.emplace_back("powerpoint");
  return out;
}

Resource selectCss(const Resource& resource, std::string_view selectorText) {
  Selector selector;
  try {
    selector = parseSelector(selectorText);
  } catch (const SelectorParseError& e) {
    badPayload(std::string("bad selector: ") + e.what());
  }
  XmlishPayload target;
  if (const auto* slide = resource.get<SlidePayload>()) {
    target = slideSvgResource(*slide).as<XmlishPayload>();
  } else if (const auto* xml = resource.get<XmlishPayload>()) {
    target = *xml;
  } else {
    throw ResolveError(ResolveErrorCode::UnsupportedMethodForKind,
                       std::string("cssSelector does not apply to ") + toString(resource.kind()));
  }
  const XmlNode* hit = selectFirst(*target.index, selector, target.mode, &target.focused());
  if (!hit) {
    throw ResolveError(ResolveErrorCode::SelectorNoMatch,
                       "no element matches '" + std::string(selectorText) + "'");
  }
  target.focus = hit;
  return target;
}

Resource slideSvgResource(const SlidePayload& slide) {
  return XmlishPayload::wrap(
      pptx::slideToSvg(slide.xml(), slide.number(), slide.presentation->widthEmu,
                       slide.presentation->heightEmu),
      XmlMode::Xml, XmlOrigin::SlideProjection);
}

Resource textResource(std::string text) {
  TextPayload payload;
  payload.text = std::move(text);
  return payload;
}

Resource jsonValueResource(const nlohmann::ordered_json& value) {
  if (value.is_object()) {
    MapPayload map;
    for (const auto& item : value.items()) {
      map.entries.emplace_back(item.key(), std::make_shared<const Resource>(jsonValueResource(item.value())));
    }
    return map;
  }
  if (value.is_array()) {
    CollectionPayload collection;
    for (std::size_t i = 0; i < value.size(); ++i) {
      collection.entries.push_back(
          {"item " + std::to_string(i), std::make_shared<const Resource>(jsonValueResource(value[i])),
           std::nullopt});
    }
    return collection;
  }
  return JsonPayload{value};
}

std::size_t estimatePdfPages(std::string_view bytes) {
  std::size_t count = 0;
  std::size_t at = 0;
  while ((at = bytes.find("/Type", at)) != std::string_view::npos) {
    at += 5;
    auto i = at;
    while (i < bytes.size() && (bytes[i] == ' ' || bytes[i] == '\r' || bytes[i] == '\n' || bytes[i] == '\t')) ++i;
    if (bytes.substr(i, 5) == "/Page") {
      const char next = i + 5 < bytes.size() ? bytes[i + 5] : ' ';
      if (!std::isalnum(static_cast<unsigned char>(next))) ++count;
    }
  }
  return count;
}

}  // namespace deeplinker
