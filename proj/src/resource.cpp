#include "deeplinker/resource.hpp"

#include "deeplinker/convert.hpp"
#include "deeplinker/utf8.hpp"

#include <ctime>

namespace deeplinker {

namespace {

using Properties = std::vector<std::pair<std::string, std::string>>;

std::string jsonTypeName(const nlohmann::ordered_json& v) {
  return std::string(v.type_name());
}

}  // namespace

const char* toString(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::Collection: return "Collection";
    case ResourceKind::Map: return "Map";
    case ResourceKind::File: return "File";
    case ResourceKind::String: return "String";
    case ResourceKind::Json: return "Json";
    case ResourceKind::Image: return "Image";
    case ResourceKind::Pdf: return "Pdf";
    case ResourceKind::Powerpoint: return "Powerpoint";
    case ResourceKind::PowerpointSlide: return "PowerpointSlide";
    case ResourceKind::Rdf: return "Rdf";
    case ResourceKind::Binary: return "Binary";
    case ResourceKind::Rect: return "Rect";
    case ResourceKind::Xmlish: return "Xmlish";
    case ResourceKind::Remote: return "Remote";
  }
  return "Unknown";
}

ResourcePtr MapPayload::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return nullptr;
}

std::vector<std::string_view> TextPayload::lines() const {
  std::vector<std::string_view> out;
  const std::string_view all(text);
  std::size_t start = 0;
  while (start < all.size()) {
    auto end = all.find('\n', start);
    const bool last = end == std::string_view::npos;
    if (last) end = all.size();
    auto line = all.substr(start, end - start);
    if (!last && !line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::size_t TextPayload::codePointCount() const { return utf8::decode(text).size(); }

XmlishPayload XmlishPayload::wrap(XmlNode document, XmlMode mode, XmlOrigin origin) {
  XmlishPayload out;
  out.document = std::make_shared<const XmlNode>(std::move(document));
  out.index = std::make_shared<const XmlTreeIndex>(*out.document);
  out.mode = mode;
  out.origin = origin;
  return out;
}

std::string formatTimestamp(std::int64_t epochMs) {
  std::int64_t seconds = epochMs / 1000;
  std::int64_t millis = epochMs % 1000;
  if (millis < 0) {
    millis += 1000;
    seconds -= 1;
  }
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis));
  return buf;
}

Properties properties(const Resource& resource) {
  return std::visit(
      [](const auto& p) -> Properties {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CollectionPayload> || std::is_same_v<T, MapPayload>) {
          return {{"size", std::to_string(p.entries.size())}};
        } else if constexpr (std::is_same_v<T, FilePayload>) {
          const auto& m = p.meta;
          return {{"name", m.name},
                  {"path", m.absolutePath},
                  {"size", std::to_string(m.sizeBytes)},
                  {"modified", formatTimestamp(m.modifiedMs)},
                  {"mediaType", m.mediaType},
                  {"isDirectory", m.isDirectory ? "true" : "false"}};
        } else if constexpr (std::is_same_v<T, TextPayload>) {
          return {{"length", std::to_string(p.codePointCount())},
                  {"lineCount", std::to_string(p.lines().size())}};
        } else if constexpr (std::is_same_v<T, JsonPayload>) {
          Properties out{{"type", jsonTypeName(p.value)}};
          if (p.value.is_object() || p.value.is_array()) {
            out.emplace_back("size", std::to_string(p.value.size()));
          }
          return out;
        } else if constexpr (std::is_same_v<T, ImagePayload>) {
          return {{"width", std::to_string(p.width)},
                  {"height", std::to_string(p.height)},
                  {"format", p.format}};
        } else if constexpr (std::is_same_v<T, PdfPayload>) {
          return {{"version", p.version}, {"pageCount", std::to_string(p.pageCount)}};
        } else if constexpr (std::is_same_v<T, PowerpointPayload>) {
          return {{"slideCount", std::to_string(p.presentation->slides.size())},
                  {"width", pptx::emuToPx(p.presentation->widthEmu)},
                  {"height", pptx::emuToPx(p.presentation->heightEmu)}};
        } else if constexpr (std::is_same_v<T, SlidePayload>) {
          return {{"number", std::to_string(p.number())},
                  {"shapeCount", std::to_string(pptx::slideShapes(p.xml()).size())},
                  {"part", p.presentation->slides.at(p.index).partName}};
        } else if constexpr (std::is_same_v<T, RdfPayload>) {
          return {{"tripleCount", std::to_string(p.triples.size())}};
        } else if constexpr (std::is_same_v<T, BinaryPayload>) {
          return {{"size", std::to_string(p.bytes->size())}, {"mediaType", p.mediaType}};
        } else if constexpr (std::is_same_v<T, RectPayload>) {
          return {{"x", std::to_string(p.x)},
                  {"y", std::to_string(p.y)},
                  {"width", std::to_string(p.width)},
                  {"height", std::to_string(p.height)}};
        } else if constexpr (std::is_same_v<T, XmlishPayload>) {
          const auto& node = p.focused();
          return {{"name", node.name},
                  {"childCount", std::to_string(node.elementChildren().size())}};
        } else {
          static_assert(std::is_same_v<T, RemotePayload>);
          return {{"uploadCount", std::to_string(p.uploads.size())}};
        }
      },
      resource.payload());
}

std::vector<ChildLink> childLinks(const Resource& resource, const DeepLink& self) {
  std::vector<ChildLink> out;
  const auto add = [&](std::string label, Segment segment) {
    out.push_back({std::move(label), appendSegment(self, std::move(segment))});
  };
  const auto addIndexed = [&](std::size_t count, const std::string& labelPrefix) {
    for (std::size_t i = 0; i < count; ++i) {
      add(labelPrefix + std::to_string(i), Segment{"index", {std::to_string(i)}});
    }
  };

  switch (resource.kind()) {
    case ResourceKind::Collection: {
      const auto& entries = resource.as<CollectionPayload>().entries;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].target) out.push_back({entries[i].label, *entries[i].target});
        else add(entries[i].label, Segment{"index", {std::to_string(i)}});
      }
      break;
    }
    case ResourceKind::Map:
      for (const auto& [key, value] : resource.as<MapPayload>().entries) add(key, childSegment(key));
      break;
    case ResourceKind::File: {
      const auto& file = resource.as<FilePayload>();
      if (file.meta.isDirectory) {
        for (const auto& name : file.entries) add(name, childSegment(name));
      } else {
        add("content", childSegment("content"));
        for (const auto& [key, value] : properties(resource)) {
          add(key, Segment{"property", {key}});
        }
      }
      break;
    }
    case ResourceKind::String: {
      const auto lines = resource.as<TextPayload>().lines();
      for (std::size_t i = 0; i < lines.size(); ++i) {
        add("line " + std::to_string(i), Segment{"line", {std::to_string(i)}});
      }
      break;
    }
    case ResourceKind::Json: {
      const auto& value = resource.as<JsonPayload>().value;
      if (value.is_object()) {
        for (const auto& item : value.items()) add(item.key(), childSegment(item.key()));
      } else if (value.is_array()) {
        addIndexed(value.size(), "item ");
      }
      break;
    }
    case ResourceKind::Powerpoint:
      addIndexed(resource.as<PowerpointPayload>().presentation->slides.size(), "slide index ");
      break;
    case ResourceKind::PowerpointSlide:
    case ResourceKind::Binary:
      for (const auto& format : listedConversions(resource)) {
        add("to " + format, Segment{"to", {format}});
      }
      break;
    case ResourceKind::Xmlish: {
      const auto& xml = resource.as<XmlishPayload>();
      for (const auto* child : xml.focused().elementChildren()) {
        add("<" + child->name + ">", Segment{"cssSelector", {pathSelector(*xml.index, *child)}});
      }
      break;
    }
    case ResourceKind::Remote:
      for (const auto& name : resource.as<RemotePayload>().uploads) add(name, childSegment(name));
      break;
    case ResourceKind::Image:
    case ResourceKind::Pdf:
    case ResourceKind::Rdf:
    case ResourceKind::Rect:
      break;
  }
  return out;
}

}  // namespace deeplinker
