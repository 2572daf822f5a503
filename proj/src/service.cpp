#include "deeplinker/service.hpp"

#include "deeplinker/assets.hpp"
#include "deeplinker/hash.hpp"
#include "deeplinker/media.hpp"
#include "deeplinker/render.hpp"
#include "deeplinker/sparql.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

namespace deeplinker {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

int statusFor(ResolveErrorCode code) {
  switch (code) {
    case ResolveErrorCode::UnknownMethod:
    case ResolveErrorCode::BadParamCount:
    case ResolveErrorCode::BadParamFormat:
      return 400;
    case ResolveErrorCode::NotFound:
    case ResolveErrorCode::SelectorNoMatch:
    case ResolveErrorCode::IndexOutOfRange:
      return 404;
    case ResolveErrorCode::UnsupportedMethodForKind:
    case ResolveErrorCode::ConversionUnavailable:
      return 422;
    case ResolveErrorCode::PathEscapesRoot:
      return 403;
    case ResolveErrorCode::DownloadFailed:
      return 502;
  }
  return 500;
}

const char* reasonPhrase(int status) {
  const char* text = httplib::status_message(status);
  return text ? text : "Error";
}

bool wantsJson(std::string_view accept) {
  std::size_t at = 0;
  while (at <= accept.size()) {
    auto end = accept.find(',', at);
    if (end == std::string_view::npos) end = accept.size();
    auto range = accept.substr(at, end - at);
    range = range.substr(0, range.find(';'));
    while (!range.empty() && range.front() == ' ') range.remove_prefix(1);
    while (!range.empty() && range.back() == ' ') range.remove_suffix(1);
    if (range == "application/json") return true;
    if (range == "text/html" || range == "*/*") return false;
    at = end + 1;
  }
  return false;
}

HttpResponse errorResponse(int status, std::string_view code, std::optional<std::size_t> segment,
                           std::string_view detail, std::string_view accept) {
  HttpResponse res;
  res.status = status;
  if (wantsJson(accept)) {
    Json body;
    body["status"] = status;
    body["code"] = code;
    if (segment) body["segment"] = *segment;
    body["detail"] = detail;
    res.contentType = "application/json";
    res.body = body.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
    return res;
  }
  std::string html = "<h1>" + std::to_string(status) + " " + reasonPhrase(status) + "</h1>\n";
  html += "<p class=\"error\" data-code=\"" + escapeXmlAttribute(code) + "\"";
  if (segment) html += " data-segment=\"" + std::to_string(*segment) + "\"";
  html += ">" + escapeHtml(code);
  if (segment) html += " at segment " + std::to_string(*segment);
  html += ": " + escapeHtml(detail) + "</p>\n";
  res.contentType = "text/html; charset=utf-8";
  res.body = htmlPage(std::to_string(status) + " " + reasonPhrase(status), html);
  return res;
}

std::string decodeComponent(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '+') {
      out += ' ';
    } else if (c == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += c;
    }
  }
  return out;
}

std::string firstValue(const FormFields& form, const std::string& key) {
  const auto it = form.find(key);
  return it == form.end() ? std::string() : it->second;
}

std::string expandKnownPrefix(const std::string& text) {
  static const std::array<std::pair<std::string_view, std::string_view>, 4> kPrefixes{{
      {"rdf:", rdf::kRdfNs},
      {"rdfs:", rdf::kRdfsNs},
      {"xsd:", rdf::kXsdNs},
      {"dl:", rdf::kVocabNs},
  }};
  for (const auto& [prefix, ns] : kPrefixes) {
    if (text.starts_with(prefix)) return std::string(ns) + text.substr(prefix.size());
  }
  return text;
}

std::string contentTypeFor(std::string_view name) {
  auto type = media::forFileName(name);
  if (type.starts_with("text/") || type == "application/javascript") type += "; charset=utf-8";
  return type;
}

std::string essenceOf(std::string_view contentType) {
  return media::essence(std::string(contentType));
}

}  // namespace

FormFields parseQueryString(std::string_view query) {
  FormFields out;
  std::size_t at = 0;
  while (at < query.size()) {
    auto end = query.find('&', at);
    if (end == std::string_view::npos) end = query.size();
    const auto pair = query.substr(at, end - at);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      if (eq == std::string_view::npos) {
        out.emplace(decodeComponent(pair), "");
      } else {
        out.emplace(decodeComponent(pair.substr(0, eq)), decodeComponent(pair.substr(eq + 1)));
      }
    }
    at = end + 1;
  }
  return out;
}

void ServiceConfig::finalize() {
  std::error_code ec;
  if (rootDir.empty() || !fs::is_directory(rootDir, ec)) {
    throw std::invalid_argument("root directory does not exist: " + rootDir.string());
  }
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
  if (baseIri.empty()) baseIri = "http://" + bindAddress + ":" + std::to_string(port);
  while (baseIri.ends_with('/')) baseIri.pop_back();
  if (!rdf::isAbsoluteIri(baseIri)) throw std::invalid_argument("base IRI must be absolute");
  const fs::path state = ".deeplinker";
  if (uploadDir.empty()) uploadDir = state / "uploads";
  if (downloadCacheDir.empty()) downloadCacheDir = state / "cache";
  if (journalPath.empty()) journalPath = state / "annotations.nt";
  fs::create_directories(uploadDir, ec);
  fs::create_directories(downloadCacheDir, ec);
}

Service::Service(ServiceConfig config, std::shared_ptr<Fetcher> fetcher,
                 std::shared_ptr<AnnotationStore> store)
    : config_(std::move(config)) {
  config_.finalize();
  if (store) {
    store_ = std::move(store);
  } else if (config_.sparqlEndpoint) {
    store_ = std::make_shared<SparqlStore>(*config_.sparqlEndpoint);
  } else {
    store_ = std::make_shared<EmbeddedStore>(config_.journalPath);
  }
  embedded_ = std::dynamic_pointer_cast<EmbeddedStore>(store_);
  if (!fetcher) fetcher = std::make_shared<HttpFetcher>();
  resolver_ = std::make_unique<Resolver>(
      ResolverConfig{config_.rootDir, config_.uploadDir, config_.downloadCacheDir, config_.baseIri},
      store_, std::move(fetcher));
}

Service::~Service() = default;

std::string Service::subjectIri(const DeepLink& link) const {
  return config_.baseIri + serializeDeepLink(link);
}

std::optional<DeepLink> Service::subjectLink(const std::string& subject) const {
  std::string_view path = subject;
  if (path.starts_with(config_.baseIri)) path.remove_prefix(config_.baseIri.size());
  if (!path.starts_with('/')) return std::nullopt;
  try {
    return parseDeepLink(path);
  } catch (const LinkError&) {
    return std::nullopt;
  }
}

HttpResponse Service::handleGet(std::string_view rawTarget, std::string_view accept) const {
  const auto q = rawTarget.find('?');
  const auto path = rawTarget.substr(0, q);
  const auto query = q == std::string_view::npos ? std::string_view() : rawTarget.substr(q + 1);
  try {
    if (path == "/") return handleIndex();
    if (path == "/search") return handleSearch(query, accept);
    if (path.starts_with("/assets/")) return handleAsset(path.substr(8));
    if (path == config_.sparqlMountPath) {
      return handleSparql("GET", "", "", parseQueryString(query));
    }
    return handleLink(path, accept);
  } catch (const std::exception& e) {
    return errorResponse(500, "InternalError", std::nullopt, e.what(), accept);
  }
}

HttpResponse Service::handleLink(std::string_view path, std::string_view accept) const {
  DeepLink link;
  try {
    link = parseDeepLink(path);
  } catch (const LinkError& e) {
    return errorResponse(400, toString(e.code()), std::nullopt,
                         std::string(e.what()) + " (offset " + std::to_string(e.position()) + ")",
                         accept);
  }

  try {
    const auto resource = resolver_->resolve(link);
    const auto format = negotiate(accept, resource.kind());
    Representation rep;
    if (format == Format::Json) {
      rep = renderJson(resource, link);
    } else {
      const auto subject = subjectIri(link);
      const auto annotations = store_->listBySubject(subject);
      rep = format == Format::Turtle ? renderTurtle(resource, subject, annotations)
                                     : renderHtml(resource, link, annotations);
    }
    HttpResponse res;
    res.contentType = std::move(rep.mediaType);
    res.body = std::move(rep.body);
    res.headers.emplace_back("Vary", "Accept");
    return res;
  } catch (const ResolveError& e) {
    return errorResponse(statusFor(e.code()), toString(e.code()), e.atSegment(), e.what(), accept);
  } catch (const StoreError& e) {
    return errorResponse(502, "EndpointUnreachable", std::nullopt, e.what(), accept);
  }
}

HttpResponse Service::handleIndex() const {
  std::string body = "<h1>DeepLinker</h1>\n<ul class=\"children\">\n";
  for (const auto name : kEntryNames) {
    body += "<li><a rel=\"child\" href=\"/" + std::string(name) + "\">" + std::string(name) +
            "</a></li>\n";
  }
  body += "</ul>\n";
  return {200, "text/html; charset=utf-8", htmlPage("DeepLinker", body), {}};
}

HttpResponse Service::handleSearch(std::string_view query, std::string_view accept) const {
  const auto params = parseQueryString(query);
  const auto needle = firstValue(params, "q");
  if (needle.empty()) return errorResponse(400, "EmptyQuery", std::nullopt, "parameter q is required", accept);

  std::vector<SearchHit> hits;
  try {
    hits = store_->searchLiteral(needle);
  } catch (const StoreError& e) {
    return errorResponse(502, "EndpointUnreachable", std::nullopt, e.what(), accept);
  }
  const auto linkOf = [&](const std::string& subject) {
    return subject.starts_with(config_.baseIri) ? subject.substr(config_.baseIri.size()) : subject;
  };

  if (wantsJson(accept)) {
    Json out = Json::array();
    for (const auto& hit : hits) {
      out.push_back({{"subject", hit.subject},
                     {"link", linkOf(hit.subject)},
                     {"predicate", hit.triple.predicate.value},
                     {"object", std::get<rdf::Literal>(hit.triple.object).lexical}});
    }
    return {200, "application/json", out.dump(2, ' ', false, Json::error_handler_t::replace) + "\n", {}};
  }
  std::string body = "<h1>Search: " + escapeHtml(needle) + "</h1>\n<ul id=\"search-results\">\n";
  for (const auto& hit : hits) {
    const auto link = linkOf(hit.subject);
    body += "<li><a href=\"" + escapeXmlAttribute(link) + "\">" + escapeHtml(link) +
            "</a> <span class=\"predicate\">" + escapeHtml(hit.triple.predicate.value) +
            "</span> <span class=\"object\">" +
            escapeHtml(std::get<rdf::Literal>(hit.triple.object).lexical) + "</span></li>\n";
  }
  body += "</ul>\n";
  return {200, "text/html; charset=utf-8", htmlPage("Search", body), {}};
}

HttpResponse Service::handleAsset(std::string_view name) const {
  const bool safe = !name.empty() && name.front() != '.' &&
                    std::all_of(name.begin(), name.end(), [](char c) {
                      return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
                    });
  if (!safe) return errorResponse(404, "NotFound", std::nullopt, "no such asset", "");
  if (config_.assetsDir) {
    const auto path = *config_.assetsDir / std::string(name);
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) {
      std::ifstream in(path, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      return {200, contentTypeFor(name), std::move(content), {{"Cache-Control", "no-cache"}}};
    }
  }
  for (const auto& asset : embeddedAssets()) {
    if (asset.name == name) {
      return {200, contentTypeFor(name), std::string(asset.content), {{"Cache-Control", "no-cache"}}};
    }
  }
  return errorResponse(404, "NotFound", std::nullopt, "no such asset", "");
}

HttpResponse Service::handleAnnotationPost(const FormFields& form, std::string_view accept) {
  const auto subject = firstValue(form, "subject");
  const auto predicate = expandKnownPrefix(firstValue(form, "predicate"));
  const auto object = firstValue(form, "object");
  const auto type = firstValue(form, "type");
  const auto bad = [&](const std::string& detail) {
    return errorResponse(400, "BadAnnotation", std::nullopt, detail, accept);
  };
  if (subject.empty()) return bad("subject is required");
  if (predicate.empty()) return bad("predicate is required");
  if (object.empty()) return bad("object is required");
  const auto link = subjectLink(subject);
  if (!link) return bad("subject is not a deep link");
  if (!rdf::isAbsoluteIri(predicate)) return bad("predicate is not an absolute IRI");

  rdf::Term objectTerm;
  if (type == "iri") {
    const auto iri = expandKnownPrefix(object);
    if (!rdf::isAbsoluteIri(iri)) return bad("object is not an absolute IRI");
    objectTerm = rdf::Iri{iri};
  } else if (type.empty() || type == "literal") {
    rdf::Literal literal{object, std::nullopt, std::nullopt};
    if (const auto lang = firstValue(form, "lang"); !lang.empty()) literal.language = lang;
    if (const auto dt = firstValue(form, "datatype"); !dt.empty()) literal.datatype = expandKnownPrefix(dt);
    objectTerm = std::move(literal);
  } else {
    return bad("type must be literal or iri");
  }

  const rdf::Triple triple{rdf::Iri{subjectIri(*link)}, rdf::Iri{predicate}, objectTerm};
  try {
    store_->addTriple(triple);
  } catch (const std::invalid_argument& e) {
    return bad(e.what());
  } catch (const StoreError& e) {
    const bool remote = e.code() == StoreErrorCode::EndpointUnreachable;
    return errorResponse(remote ? 502 : 500, remote ? "EndpointUnreachable" : "StorageFailure",
                         std::nullopt, e.what(), accept);
  }

  const auto location = serializeDeepLink(*link);
  if (wantsJson(accept)) {
    Json out;
    out["subject"] = std::get<rdf::Iri>(triple.subject).value;
    out["link"] = location;
    out["predicate"] = predicate;
    out["object"] = rdf::toNTriples(objectTerm);
    out["objectText"] = std::holds_alternative<rdf::Iri>(objectTerm)
                            ? std::get<rdf::Iri>(objectTerm).value
                            : std::get<rdf::Literal>(objectTerm).lexical;
    return {201, "application/json", out.dump(2, ' ', false, Json::error_handler_t::replace) + "\n", {}};
  }
  return {303, "text/plain; charset=utf-8", location, {{"Location", location}}};
}

HttpResponse Service::handleBookmarkPost(const FormFields& form, std::string_view accept) {
  FormFields fields;
  fields.emplace("subject", firstValue(form, "subject"));
  fields.emplace("predicate", std::string(rdf::kRdfType));
  fields.emplace("object", std::string(rdf::kBookmarkClass));
  fields.emplace("type", "iri");
  return handleAnnotationPost(fields, accept);
}

HttpResponse Service::handleUpload(const std::vector<std::pair<std::string, std::string>>& fileParts) {
  if (fileParts.empty()) {
    return errorResponse(400, "BadUpload", std::nullopt, "multipart body has no file part", "");
  }
  const auto& content = fileParts.front().second;
  if (content.size() > config_.maxUploadBytes) {
    return errorResponse(413, "PayloadTooLarge", std::nullopt, "upload exceeds the size limit", "");
  }
  const auto hash = sha256Hex(content);
  const auto path = config_.uploadDir / hash;
  try {
    std::error_code ec;
    if (!fs::exists(path, ec)) writeFileAtomically(path, content);
  } catch (const std::exception& e) {
    return errorResponse(500, "StorageFailure", std::nullopt, e.what(), "");
  }
  const auto link = serializeDeepLink(DeepLink{{childSegment("remote"), childSegment(hash)}});
  return {201, "text/plain; charset=utf-8", link, {{"Location", link}}};
}

HttpResponse Service::handleSparql(std::string_view method, std::string_view contentType,
                                   const std::string& body, const FormFields& params) const {
  if (!embedded_) {
    return errorResponse(404, "NotFound", std::nullopt,
                         "the SPARQL endpoint is only mounted for the embedded store", "");
  }
  std::string query;
  std::string update;
  const auto type = essenceOf(contentType);
  if (method == "GET") {
    query = firstValue(params, "query");
  } else if (type == "application/sparql-query") {
    query = body;
  } else if (type == "application/sparql-update") {
    update = body;
  } else {
    query = firstValue(params, "query");
    update = firstValue(params, "update");
  }
  try {
    if (!query.empty()) {
      const auto result = sparql::select(query, embedded_->snapshot());
      return {200, "application/sparql-results+json",
              sparql::toResultsJson(result).dump(-1, ' ', false, Json::error_handler_t::replace), {}};
    }
    if (!update.empty()) {
      for (const auto& t : sparql::parseInsertData(update)) embedded_->addTriple(t);
      return {204, "text/plain", "", {}};
    }
  } catch (const sparql::SparqlError& e) {
    return errorResponse(400, "MalformedQuery", std::nullopt, e.what(), "");
  } catch (const std::invalid_argument& e) {
    return errorResponse(400, "BadTriple", std::nullopt, e.what(), "");
  } catch (const StoreError& e) {
    return errorResponse(500, "StorageFailure", std::nullopt, e.what(), "");
  }
  return errorResponse(400, "MalformedQuery", std::nullopt, "no query or update given", "");
}

namespace {

void apply(const HttpResponse& from, httplib::Response& to) {
  to.status = from.status;
  for (const auto& [key, value] : from.headers) to.set_header(key, value);
  to.set_content(from.body, from.contentType.empty() ? "text/plain" : from.contentType);
}

FormFields formFields(const httplib::Request& req) {
  if (req.is_multipart_form_data()) {
    FormFields out;
    for (const auto& [name, part] : req.files) {
      if (part.filename.empty()) out.emplace(name, part.content);
    }
    return out;
  }
  return parseQueryString(req.body);
}

}  // namespace

bool Service::bind() {
  server_ = std::make_unique<httplib::Server>();
  server_->set_tcp_nodelay(true);
  server_->set_payload_max_length(config_.maxUploadBytes + (1u << 20));
  server_->set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (req.method != "GET" && req.method != "HEAD") return httplib::Server::HandlerResponse::Unhandled;
    apply(handleGet(req.target, req.get_header_value("Accept")), res);
    return httplib::Server::HandlerResponse::Handled;
  });
  server_->Post("/annotations", [this](const httplib::Request& req, httplib::Response& res) {
    apply(handleAnnotationPost(formFields(req), req.get_header_value("Accept")), res);
  });
  server_->Post("/bookmarks", [this](const httplib::Request& req, httplib::Response& res) {
    apply(handleBookmarkPost(formFields(req), req.get_header_value("Accept")), res);
  });
  server_->Post("/remote", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      apply(errorResponse(400, "BadUpload", std::nullopt, "expected multipart/form-data", ""), res);
      return;
    }
    std::vector<std::pair<std::string, std::string>> parts;
    for (const auto& [name, part] : req.files) {
      if (!part.filename.empty()) parts.emplace_back(part.filename, part.content);
    }
    apply(handleUpload(parts), res);
  });
  server_->Post(config_.sparqlMountPath, [this](const httplib::Request& req, httplib::Response& res) {
    const auto type = req.get_header_value("Content-Type");
    const auto params = essenceOf(type) == "application/x-www-form-urlencoded"
                            ? parseQueryString(req.body)
                            : FormFields{};
    apply(handleSparql("POST", type, req.body, params), res);
  });
  server_->set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string detail = "unexpected failure";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          detail = e.what();
        } catch (...) {
        }
        apply(errorResponse(500, "InternalError", std::nullopt, detail, ""), res);
      });

  if (config_.port == 0) {
    boundPort_ = server_->bind_to_any_port(config_.bindAddress);
    return boundPort_ > 0;
  }
  if (!server_->bind_to_port(config_.bindAddress, config_.port)) return false;
  boundPort_ = config_.port;
  return true;
}

void Service::run() {
  if (!server_) return;
  running_ = true;
  if (stopRequested_) return;
  server_->listen_after_bind();
}

void Service::stop() {
  stopRequested_ = true;
  if (!server_ || !running_) return;
  server_->wait_until_ready();
  server_->stop();
}

}  // namespace deeplinker
