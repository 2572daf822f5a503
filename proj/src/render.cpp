#include "deeplinker/render.hpp"

#include "deeplinker/hash.hpp"
#include "deeplinker/utf8.hpp"

#include <algorithm>
#include <cctype>

namespace deeplinker {

namespace {

using Json = nlohmann::ordered_json;

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

std::string attr(std::string_view text) { return escapeXmlAttribute(text); }

std::string termText(const rdf::Term& term) {
  if (const auto* iri = std::get_if<rdf::Iri>(&term)) return iri->value;
  if (const auto* literal = std::get_if<rdf::Literal>(&term)) return literal->lexical;
  return "_:" + std::get<rdf::BlankNode>(term).label;
}

bool isBookmarked(const std::vector<rdf::Triple>& annotations) {
  return std::any_of(annotations.begin(), annotations.end(), [](const rdf::Triple& t) {
    const auto* object = std::get_if<rdf::Iri>(&t.object);
    return t.predicate.value == rdf::kRdfType && object && object->value == rdf::kBookmarkClass;
  });
}

void textView(std::string& out, const TextPayload& text) {
  const TextPayload& shown = text.source ? *text.source : text;
  if (text.source && text.focusRange) {
    const auto cps = utf8::decode(shown.text);
    const auto [start, end] = *text.focusRange;
    const std::u32string_view all(cps);
    out += "<pre class=\"text\">";
    out += escapeHtml(utf8::encode(all.substr(0, start)));
    out += "<mark class=\"highlight\">";
    out += escapeHtml(utf8::encode(all.substr(start, end - start)));
    out += "</mark>";
    out += escapeHtml(utf8::encode(all.substr(end)));
    out += "</pre>\n";
    return;
  }
  const auto lines = shown.lines();
  out += "<ol class=\"lines\" start=\"0\">\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool focused = text.source && text.focusLine == i;
    out += focused ? "<li class=\"highlight\">" : "<li>";
    out += escapeHtml(lines[i]);
    out += "</li>\n";
  }
  out += "</ol>\n";
}

void imageView(std::string& out, const ImagePayload& image, const RectPayload* rect) {
  out += "<div class=\"image-view\" style=\"position:relative;display:inline-block\">";
  out += "<img src=\"data:" + attr(image.mediaType) + ";base64," + base64Encode(*image.bytes) +
         "\" width=\"" + std::to_string(image.width) + "\" height=\"" +
         std::to_string(image.height) + "\" alt=\"\">";
  if (rect) {
    const auto x = std::to_string(rect->x);
    const auto y = std::to_string(rect->y);
    const auto w = std::to_string(rect->width);
    const auto h = std::to_string(rect->height);
    out += "<div class=\"highlight\" data-x=\"" + x + "\" data-y=\"" + y + "\" data-w=\"" + w +
           "\" data-h=\"" + h + "\" style=\"position:absolute;box-sizing:border-box;left:" + x +
           "px;top:" + y + "px;width:" + w + "px;height:" + h +
           "px;border:2px solid #d0021b\"></div>";
  }
  out += "</div>\n";
}

void xmlishView(std::string& out, const XmlishPayload& xml) {
  const bool selected = xml.focus != nullptr;
  if (xml.origin == XmlOrigin::SlideProjection) {
    SerializeOptions options;
    options.mode = XmlMode::Xml;
    const bool wholeDocument = selected && xml.focus == xml.document.get();
    if (selected && !wholeDocument) {
      options.mark = xml.focus;
      options.markBefore = "<g class=\"highlight\">";
      options.markAfter = "</g>";
    }
    out += wholeDocument ? "<div class=\"slide-view highlight\">" : "<div class=\"slide-view\">";
    out += serializeXml(*xml.document, options);
    out += "</div>\n";
    return;
  }
  // Sentinels survive escaping and are swapped for the highlight markup.
  static constexpr std::string_view kOpen = "\x01" "dl-mark-open" "\x01";
  static constexpr std::string_view kClose = "\x01" "dl-mark-close" "\x01";
  SerializeOptions options;
  options.mode = xml.mode;
  if (selected) {
    options.mark = xml.focus;
    options.markBefore = kOpen;
    options.markAfter = kClose;
  }
  auto escaped = escapeHtml(serializeXml(*xml.document, options));
  if (selected) {
    const auto open = escaped.find(kOpen);
    if (open != std::string::npos) escaped.replace(open, kOpen.size(), "<span class=\"highlight\">");
    const auto close = escaped.find(kClose);
    if (close != std::string::npos) escaped.replace(close, kClose.size(), "</span>");
  }
  out += "<pre class=\"source\">" + escaped + "</pre>\n";
}

void kindView(std::string& out, const Resource& resource) {
  switch (resource.kind()) {
    case ResourceKind::String:
      textView(out, resource.as<TextPayload>());
      break;
    case ResourceKind::Json:
      out += "<pre class=\"json\">" + escapeHtml(resource.as<JsonPayload>().value.dump(2)) + "</pre>\n";
      break;
    case ResourceKind::Image:
      imageView(out, resource.as<ImagePayload>(), nullptr);
      break;
    case ResourceKind::Rect: {
      const auto& rect = resource.as<RectPayload>();
      imageView(out, *rect.image, &rect);
      break;
    }
    case ResourceKind::PowerpointSlide: {
      const auto& slide = resource.as<SlidePayload>();
      out += "<div class=\"slide-view\">";
      out += serializeXml(pptx::slideToSvg(slide.xml(), slide.number(), slide.presentation->widthEmu,
                                           slide.presentation->heightEmu));
      out += "</div>\n";
      break;
    }
    case ResourceKind::Xmlish:
      xmlishView(out, resource.as<XmlishPayload>());
      break;
    case ResourceKind::Rdf:
      out += "<pre class=\"rdf\">" +
             escapeHtml(rdf::toNTriplesDocument(resource.as<RdfPayload>().triples)) + "</pre>\n";
      break;
    case ResourceKind::Remote:
      out += "<form class=\"upload\" method=\"post\" action=\"/remote\" enctype=\"multipart/form-data\">"
             "<input type=\"file\" name=\"file\" required> <button type=\"submit\">Upload</button>"
             "</form>\n";
      break;
    default:
      break;
  }
}

void annotationSection(std::string& out, const std::string& selfText,
                       const std::vector<rdf::Triple>& annotations) {
  out += "<section class=\"annotations\">\n<h2>Statements</h2>\n<ul id=\"triples\">\n";
  for (const auto& t : annotations) {
    out += "<li data-predicate=\"" + attr(t.predicate.value) + "\" data-object=\"" +
           attr(rdf::toNTriples(t.object)) + "\"><span class=\"predicate\">" +
           escapeHtml(t.predicate.value) + "</span> <span class=\"object\">" +
           escapeHtml(termText(t.object)) + "</span></li>\n";
  }
  out += "</ul>\n";
  out += "<form id=\"annotation-form\" method=\"post\" action=\"/annotations\">"
         "<input type=\"hidden\" name=\"subject\" value=\"" + attr(selfText) + "\">"
         "<label>Predicate <input name=\"predicate\" required value=\"" +
         attr(rdf::kRdfsComment) + "\"></label> "
         "<label>Object <input name=\"object\" required></label> "
         "<select name=\"type\"><option value=\"literal\">literal</option>"
         "<option value=\"iri\">IRI</option></select> "
         "<button type=\"submit\">Add</button></form>\n</section>\n";
}

Json payloadJson(const Resource& resource) {
  Json out = Json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CollectionPayload>) {
          out["entries"] = Json::array();
          for (const auto& e : p.entries) out["entries"].push_back(e.label);
        } else if constexpr (std::is_same_v<T, MapPayload>) {
          out["keys"] = Json::array();
          for (const auto& e : p.entries) out["keys"].push_back(e.first);
        } else if constexpr (std::is_same_v<T, FilePayload>) {
          out["name"] = p.meta.name;
          out["path"] = p.meta.absolutePath;
          out["size"] = p.meta.sizeBytes;
          out["modified"] = formatTimestamp(p.meta.modifiedMs);
          out["mediaType"] = p.meta.mediaType;
          out["isDirectory"] = p.meta.isDirectory;
          if (p.meta.isDirectory) out["entries"] = p.entries;
        } else if constexpr (std::is_same_v<T, TextPayload>) {
          out["text"] = p.text;
          if (p.focusLine) out["line"] = *p.focusLine;
          if (p.focusRange) out["range"] = {p.focusRange->first, p.focusRange->second};
        } else if constexpr (std::is_same_v<T, JsonPayload>) {
          out["value"] = p.value;
        } else if constexpr (std::is_same_v<T, ImagePayload>) {
          out["format"] = p.format;
          out["mediaType"] = p.mediaType;
          out["width"] = p.width;
          out["height"] = p.height;
        } else if constexpr (std::is_same_v<T, PdfPayload>) {
          out["version"] = p.version;
          out["pageCount"] = p.pageCount;
        } else if constexpr (std::is_same_v<T, PowerpointPayload>) {
          out["slideCount"] = p.presentation->slides.size();
        } else if constexpr (std::is_same_v<T, SlidePayload>) {
          out["number"] = p.number();
          out["shapes"] = Json::array();
          for (const auto& s : pptx::slideShapes(p.xml())) {
            out["shapes"].push_back({{"name", s.name},
                                     {"x", pptx::emuToPx(s.x)},
                                     {"y", pptx::emuToPx(s.y)},
                                     {"width", pptx::emuToPx(s.width)},
                                     {"height", pptx::emuToPx(s.height)},
                                     {"paragraphs", s.paragraphs}});
          }
        } else if constexpr (std::is_same_v<T, RdfPayload>) {
          out["triples"] = Json::array();
          for (const auto& t : p.triples) out["triples"].push_back(rdf::toNTriples(t));
        } else if constexpr (std::is_same_v<T, BinaryPayload>) {
          out["mediaType"] = p.mediaType;
          out["size"] = p.bytes->size();
        } else if constexpr (std::is_same_v<T, RectPayload>) {
          out["x"] = p.x;
          out["y"] = p.y;
          out["w"] = p.width;
          out["h"] = p.height;
        } else if constexpr (std::is_same_v<T, XmlishPayload>) {
          out["name"] = p.focused().name;
          out["markup"] = utf8::sanitize(serializeXml(p.focused(), {p.mode, nullptr, {}, {}}));
        } else {
          out["uploads"] = p.uploads;
        }
      },
      resource.payload());
  return out;
}

void writeTurtleTerm(std::string& out, const rdf::Term& term) {
  if (const auto* literal = std::get_if<rdf::Literal>(&term); literal && literal->datatype &&
                                                           literal->datatype->starts_with(rdf::kXsdNs)) {
    out += "\"" + rdf::escapeLiteral(literal->lexical) + "\"^^xsd:" +
           literal->datatype->substr(rdf::kXsdNs.size());
    return;
  }
  out += rdf::toNTriples(term);
}

}  // namespace

const char* toString(Format format) {
  switch (format) {
    case Format::Html: return "html";
    case Format::Json: return "json";
    case Format::Turtle: return "turtle";
  }
  return "html";
}

Format negotiate(std::string_view acceptHeader, ResourceKind kind) {
  std::size_t at = 0;
  while (at <= acceptHeader.size()) {
    auto end = acceptHeader.find(',', at);
    if (end == std::string_view::npos) end = acceptHeader.size();
    auto range = acceptHeader.substr(at, end - at);
    range = trim(range.substr(0, range.find(';')));
    const auto type = lower(range);
    if (type == "application/json") return Format::Json;
    if (type == "text/turtle" && kind == ResourceKind::File) return Format::Turtle;
    if (type == "text/html" || type == "*/*") return Format::Html;
    at = end + 1;
  }
  return Format::Html;
}

std::string escapeHtml(std::string_view text) { return escapeXmlText(text); }

std::string htmlPage(std::string_view title, std::string_view body) {
  std::string out;
  out.reserve(body.size() + 512);
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += escapeHtml(title);
  out += "</title>\n<link rel=\"stylesheet\" href=\"/assets/deeplinker.css\">\n"
         "<script src=\"/assets/deeplinker.js\" defer></script>\n</head>\n<body>\n"
         "<header><a href=\"/\">DeepLinker</a> "
         "<form class=\"search\" method=\"get\" action=\"/search\">"
         "<input type=\"search\" name=\"q\" placeholder=\"Search literals\"> "
         "<button type=\"submit\">Search</button></form></header>\n<main>\n";
  out += body;
  out += "</main>\n</body>\n</html>\n";
  return out;
}

Representation renderHtml(const Resource& resource, const DeepLink& self,
                          const std::vector<rdf::Triple>& annotations) {
  const auto selfText = serializeDeepLink(self);
  std::string body;
  body += "<h1><span class=\"kind\">";
  body += toString(resource.kind());
  body += "</span> <code id=\"deeplink\">" + escapeHtml(selfText) + "</code></h1>\n";

  body += "<nav class=\"breadcrumbs\">";
  for (std::size_t i = 1; i < self.size(); ++i) {
    const auto prefix = serializeDeepLink(self.prefix(i));
    body += "<a rel=\"up\" href=\"" + attr(prefix) + "\">" +
            escapeHtml(serializeDeepLink(DeepLink{{self.segments[i - 1]}}).substr(1)) + "</a> / ";
  }
  body += "</nav>\n";

  const bool bookmarked = isBookmarked(annotations);
  body += "<form id=\"bookmark\" method=\"post\" action=\"/bookmarks\" data-bookmarked=\"";
  body += bookmarked ? "true" : "false";
  body += "\"><input type=\"hidden\" name=\"subject\" value=\"" + attr(selfText) +
          "\"><button type=\"submit\">";
  body += bookmarked ? "Bookmarked" : "Bookmark";
  body += "</button></form>\n";

  body += "<table class=\"properties\">\n";
  for (const auto& [key, value] : properties(resource)) {
    body += "<tr><th>" + escapeHtml(key) + "</th><td>" + escapeHtml(value) + "</td></tr>\n";
  }
  body += "</table>\n";

  kindView(body, resource);

  body += "<ul class=\"children\">\n";
  for (const auto& child : childLinks(resource, self)) {
    body += "<li><a rel=\"child\" href=\"" + attr(serializeDeepLink(child.link)) + "\">" +
            escapeHtml(child.label) + "</a></li>\n";
  }
  body += "</ul>\n";

  annotationSection(body, selfText, annotations);
  return {"text/html; charset=utf-8", htmlPage(selfText, body)};
}

Representation renderJson(const Resource& resource, const DeepLink& self) {
  Json out;
  out["kind"] = toString(resource.kind());
  out["link"] = serializeDeepLink(self);
  out["properties"] = Json::object();
  for (const auto& [key, value] : properties(resource)) out["properties"][key] = value;
  out["children"] = Json::array();
  for (const auto& child : childLinks(resource, self)) {
    out["children"].push_back(serializeDeepLink(child.link));
  }
  const auto payload = payloadJson(resource);
  for (const auto& [key, value] : payload.items()) out[key] = value;
  return {"application/json", out.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"};
}

std::vector<rdf::Triple> fileMetadataTriples(const FileMeta& meta, const std::string& subjectIri) {
  const rdf::Iri subject{subjectIri};
  const auto vocab = [](std::string_view term) { return rdf::Iri{std::string(rdf::kVocabNs) + std::string(term)}; };
  const auto typed = [](std::string lexical, std::string_view xsd) {
    return rdf::Literal{std::move(lexical), std::string(rdf::kXsdNs) + std::string(xsd), std::nullopt};
  };
  return {
      {subject, vocab("name"), rdf::Literal{meta.name, std::nullopt, std::nullopt}},
      {subject, vocab("path"), rdf::Literal{meta.absolutePath, std::nullopt, std::nullopt}},
      {subject, vocab("size"), typed(std::to_string(meta.sizeBytes), "integer")},
      {subject, vocab("modified"), typed(formatTimestamp(meta.modifiedMs), "dateTime")},
      {subject, vocab("mediaType"), rdf::Literal{meta.mediaType, std::nullopt, std::nullopt}},
      {subject, vocab("isDirectory"), typed(meta.isDirectory ? "true" : "false", "boolean")},
  };
}

Representation renderTurtle(const Resource& resource, const std::string& subjectIri,
                            const std::vector<rdf::Triple>& annotations) {
  const auto& file = resource.as<FilePayload>();
  std::string out;
  out += "@prefix dl: <" + std::string(rdf::kVocabNs) + "> .\n";
  out += "@prefix xsd: <" + std::string(rdf::kXsdNs) + "> .\n\n";
  out += "<" + subjectIri + ">";
  const auto metadata = fileMetadataTriples(file.meta, subjectIri);
  for (std::size_t i = 0; i < metadata.size(); ++i) {
    out += i == 0 ? "\n    " : " ;\n    ";
    out += "dl:" + metadata[i].predicate.value.substr(rdf::kVocabNs.size()) + " ";
    writeTurtleTerm(out, metadata[i].object);
  }
  out += " .\n";
  if (!annotations.empty()) out += "\n";
  for (const auto& t : annotations) out += rdf::toNTriples(t) + "\n";
  return {"text/turtle; charset=utf-8", out};
}

}  // namespace deeplinker
