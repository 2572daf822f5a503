#pragma once

#include "deeplinker/link.hpp"
#include "deeplinker/pptx.hpp"
#include "deeplinker/rdf.hpp"
#include "deeplinker/selector.hpp"
#include "deeplinker/xml.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace deeplinker {

// Declaration order matches the payload variant in Resource.
enum class ResourceKind : std::uint8_t {
  Collection,
  Map,
  File,
  String,
  Json,
  Image,
  Pdf,
  Powerpoint,
  PowerpointSlide,
  Rdf,
  Binary,
  Rect,
  Xmlish,
  Remote,
};

inline constexpr std::array<ResourceKind, 14> kAllResourceKinds{
    ResourceKind::Collection, ResourceKind::Map,        ResourceKind::File,
    ResourceKind::String,     ResourceKind::Json,       ResourceKind::Image,
    ResourceKind::Pdf,        ResourceKind::Powerpoint, ResourceKind::PowerpointSlide,
    ResourceKind::Rdf,        ResourceKind::Binary,     ResourceKind::Rect,
    ResourceKind::Xmlish,     ResourceKind::Remote,
};

const char* toString(ResourceKind kind);

using Bytes = std::shared_ptr<const std::string>;

class Resource;
using ResourcePtr = std::shared_ptr<const Resource>;

struct CollectionEntry {
  std::string label;
  ResourcePtr value;               // in-memory element, or
  std::optional<DeepLink> target;  // a link resolved on access (bookmarks)
};

struct CollectionPayload {
  std::vector<CollectionEntry> entries;
};

struct MapPayload {
  std::vector<std::pair<std::string, ResourcePtr>> entries;  // keys unique, ordered

  ResourcePtr find(std::string_view key) const;
};

struct FileMeta {
  std::string name;
  std::string absolutePath;
  std::uint64_t sizeBytes = 0;
  std::int64_t modifiedMs = 0;  // epoch milliseconds, UTC
  std::string mediaType;
  bool isDirectory = false;
};

struct FilePayload {
  FileMeta meta;
  std::filesystem::path jail;        // canonical directory the file must stay under
  std::vector<std::string> entries;  // directories only, byte-order sorted
};

struct TextPayload {
  std::string text;
  // When cut out of a larger text by line@ or substring@: the parent text and
  // where this piece sits in it (line index, or code-point range).
  std::shared_ptr<const TextPayload> source;
  std::optional<std::size_t> focusLine;
  std::optional<std::pair<std::size_t, std::size_t>> focusRange;

  // Lines split on '\n' with a preceding '\r' dropped; a final newline does
  // not start an extra line.
  std::vector<std::string_view> lines() const;
  std::size_t codePointCount() const;
};

struct JsonPayload {
  nlohmann::ordered_json value;
};

struct ImagePayload {
  std::string format;
  std::string mediaType;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Bytes bytes;
};

struct PdfPayload {
  std::string version;
  std::size_t pageCount = 0;  // estimate from an uncompressed object scan
  Bytes bytes;
};

struct PowerpointPayload {
  std::shared_ptr<const pptx::Presentation> presentation;
  Bytes bytes;
};

struct SlidePayload {
  std::shared_ptr<const pptx::Presentation> presentation;
  std::size_t index = 0;  // zero-based; the slide number is index + 1

  const XmlNode& xml() const { return *presentation->slides.at(index).xml; }
  std::size_t number() const { return index + 1; }
};

struct RdfPayload {
  std::vector<rdf::Triple> triples;
};

struct BinaryPayload {
  Bytes bytes;
  std::string mediaType;
};

struct RectPayload {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::shared_ptr<const ImagePayload> image;
};

enum class XmlOrigin {
  Source,           // parsed from bytes
  SlideProjection,  // generated SVG for a slide
};

struct XmlishPayload {
  std::shared_ptr<const XmlNode> document;
  std::shared_ptr<const XmlTreeIndex> index;
  const XmlNode* focus = nullptr;  // nullptr: the document root
  XmlMode mode = XmlMode::Xml;
  XmlOrigin origin = XmlOrigin::Source;

  const XmlNode& focused() const { return focus ? *focus : *document; }
  static XmlishPayload wrap(XmlNode document, XmlMode mode, XmlOrigin origin);
};

struct RemotePayload {
  std::vector<std::string> uploads;  // names under the upload directory
};

class Resource {
 public:
  using Payload =
      std::variant<CollectionPayload, MapPayload, FilePayload, TextPayload, JsonPayload,
                   ImagePayload, PdfPayload, PowerpointPayload, SlidePayload, RdfPayload,
                   BinaryPayload, RectPayload, XmlishPayload, RemotePayload>;
  static_assert(std::variant_size_v<Payload> == kAllResourceKinds.size());

  Resource(Payload payload) : payload_(std::move(payload)) {}  // NOLINT(implicit)

  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, Resource> &&
             !std::is_same_v<std::decay_t<T>, Payload> && std::is_constructible_v<Payload, T &&>)
  Resource(T&& payload) : payload_(std::forward<T>(payload)) {}  // NOLINT(implicit)

  ResourceKind kind() const { return static_cast<ResourceKind>(payload_.index()); }
  const Payload& payload() const { return payload_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(payload_);
  }
  template <typename T>
  const T* get() const {
    return std::get_if<T>(&payload_);
  }

 private:
  Payload payload_;
};

// Key/value view used by `property@key` and the renderers.
std::vector<std::pair<std::string, std::string>> properties(const Resource& resource);

struct ChildLink {
  std::string label;
  DeepLink link;
};

// Hypermedia fan-out: links one step deeper from `self`.
std::vector<ChildLink> childLinks(const Resource& resource, const DeepLink& self);

// ISO-8601 UTC with milliseconds.
std::string formatTimestamp(std::int64_t epochMs);

}  // namespace deeplinker
