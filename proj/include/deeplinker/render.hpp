#pragma once

#include "deeplinker/link.hpp"
#include "deeplinker/rdf.hpp"
#include "deeplinker/resource.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace deeplinker {

enum class Format { Html, Json, Turtle };

const char* toString(Format format);

// Media ranges are scanned in order with quality weights ignored; the first
// range that applies to the resource wins. Turtle applies to File only.
Format negotiate(std::string_view acceptHeader, ResourceKind kind);

struct Representation {
  std::string mediaType;
  std::string body;
};

// HTML hypermedia page. Machine-readable anchors:
//   #deeplink         the serialized link
//   a[rel=child]      one per child link
//   .highlight        the focused fragment (line, rect overlay, selection)
//   #annotation-form  POST /annotations (subject, predicate, object, type)
//   #triples          one li per annotation
//   #bookmark         POST /bookmarks (subject)
Representation renderHtml(const Resource& resource, const DeepLink& self,
                          const std::vector<rdf::Triple>& annotations);

// {kind, link, properties, children, ...kind-specific fields}.
Representation renderJson(const Resource& resource, const DeepLink& self);

// File metadata in the dl: vocabulary followed by the annotations.
Representation renderTurtle(const Resource& resource, const std::string& subjectIri,
                            const std::vector<rdf::Triple>& annotations);

std::vector<rdf::Triple> fileMetadataTriples(const FileMeta& meta, const std::string& subjectIri);

// Shared page chrome for the service's non-resource pages.
std::string htmlPage(std::string_view title, std::string_view body);

std::string escapeHtml(std::string_view text);

}  // namespace deeplinker
