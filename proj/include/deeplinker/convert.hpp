#pragma once

#include "deeplinker/error.hpp"
#include "deeplinker/resource.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace deeplinker {

// Targets accepted by `to@`. "svg" only applies to PowerpointSlide.
inline constexpr std::array<std::string_view, 10> kConversionFormats{
    "string", "json", "image", "pdf", "powerpoint", "html", "xml", "rdf", "binary", "svg"};

// Whether (kind, format) has a registered converter. Registered does not mean
// the conversion succeeds: Binary sources are also checked against their
// sniffed media type and the payload must parse.
bool isConversionRegistered(ResourceKind kind, std::string_view format);

// Throws ResolveError: ConversionUnavailable when unregistered or the
// sniffed media type rules the target out; BadParamFormat when the payload
// does not parse in the target format.
Resource convert(const Resource& resource, std::string_view format);

// Conversions advertised as child links: those whose sniffed source type
// matches, so following them is expected to succeed.
std::vector<std::string> listedConversions(const Resource& resource);

// Applies a cssSelector to an Xmlish (within its focus) or to a slide's SVG
// projection. Throws BadParamFormat or SelectorNoMatch.
Resource selectCss(const Resource& resource, std::string_view selectorText);

Resource slideSvgResource(const SlidePayload& slide);

Resource textResource(std::string text);

// Navigation into JSON: objects become Map, arrays Collection, scalars Json.
Resource jsonValueResource(const nlohmann::ordered_json& value);

// Estimated page count: "/Type /Page" occurrences that are not "/Pages".
std::size_t estimatePdfPages(std::string_view bytes);

}  // namespace deeplinker
