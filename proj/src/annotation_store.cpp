#include "deeplinker/annotation.hpp"

#include "deeplinker/sparql.hpp"
#include "deeplinker/utf8.hpp"

#include <httplib.h>

#include <fstream>
#include <iterator>
#include <mutex>

namespace deeplinker {

namespace fs = std::filesystem;

void validateAnnotation(const rdf::Triple& triple) {
  const auto* subject = std::get_if<rdf::Iri>(&triple.subject);
  if (!subject || !rdf::isAbsoluteIri(subject->value)) {
    throw std::invalid_argument("subject must be an absolute IRI");
  }
  if (!rdf::isAbsoluteIri(triple.predicate.value)) {
    throw std::invalid_argument("predicate must be an absolute IRI");
  }
  if (const auto* iri = std::get_if<rdf::Iri>(&triple.object)) {
    if (!rdf::isAbsoluteIri(iri->value)) throw std::invalid_argument("object IRI must be absolute");
  } else if (const auto* literal = std::get_if<rdf::Literal>(&triple.object)) {
    if (literal->datatype && literal->language) {
      throw std::invalid_argument("a literal has a datatype or a language, not both");
    }
    if (literal->datatype && !rdf::isAbsoluteIri(*literal->datatype)) {
      throw std::invalid_argument("datatype must be an absolute IRI");
    }
  } else {
    throw std::invalid_argument("blank nodes are not stored");
  }
}

rdf::Triple AnnotationStore::bookmarkTriple(const std::string& subjectIri) {
  return rdf::Triple{rdf::Iri{subjectIri}, rdf::Iri{std::string(rdf::kRdfType)},
                     rdf::Iri{std::string(rdf::kBookmarkClass)}};
}

void AnnotationStore::addBookmark(const DeepLink& link, const std::string& baseIri) {
  addTriple(bookmarkTriple(baseIri + serializeDeepLink(link)));
}

// EmbeddedStore

EmbeddedStore::EmbeddedStore(std::optional<fs::path> journal) : journalPath_(std::move(journal)) {
  if (!journalPath_) return;
  std::error_code ec;
  if (journalPath_->has_parent_path()) fs::create_directories(journalPath_->parent_path(), ec);

  if (fs::exists(*journalPath_)) {
    std::string content;
    {
      std::ifstream in(*journalPath_, std::ios::binary);
      if (!in) throw StoreError(StoreErrorCode::StorageFailure, "cannot read journal");
      content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    // A crash mid-append leaves an unterminated last line; drop it.
    const auto lastNewline = content.rfind('\n');
    const std::size_t complete = lastNewline == std::string::npos ? 0 : lastNewline + 1;
    if (complete != content.size()) {
      fs::resize_file(*journalPath_, complete, ec);
      if (ec) throw StoreError(StoreErrorCode::StorageFailure, "cannot repair journal: " + ec.message());
    }
    std::size_t lineNo = 0;
    std::size_t at = 0;
    while (at < complete) {
      const auto end = content.find('\n', at);
      const std::string_view line(content.data() + at, end - at);
      at = end + 1;
      ++lineNo;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string_view::npos || line[first] == '#') continue;
      try {
        for (const auto& t : rdf::parseTurtle(line)) insertLocked(t);
      } catch (const rdf::RdfParseError& e) {
        throw StoreError(StoreErrorCode::StorageFailure,
                         "journal line " + std::to_string(lineNo) + ": " + e.what());
      }
    }
  }

  journal_ = std::fopen(journalPath_->c_str(), "ab");
  if (!journal_) {
    throw StoreError(StoreErrorCode::StorageFailure, "cannot open journal " + journalPath_->string());
  }
}

EmbeddedStore::~EmbeddedStore() {
  if (journal_) std::fclose(journal_);
}

bool EmbeddedStore::insertLocked(const rdf::Triple& triple) {
  if (!keys_.insert(rdf::toNTriples(triple)).second) return false;
  triples_.push_back(triple);
  return true;
}

void EmbeddedStore::addTriple(const rdf::Triple& triple) {
  validateAnnotation(triple);
  const auto line = rdf::toNTriples(triple) + "\n";
  std::unique_lock lock(mutex_);
  if (keys_.contains(line.substr(0, line.size() - 1))) return;
  if (journal_) {
    if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fflush(journal_) != 0) {
      throw StoreError(StoreErrorCode::StorageFailure, "journal append failed");
    }
  }
  insertLocked(triple);
}

std::vector<rdf::Triple> EmbeddedStore::listBySubject(const std::string& subjectIri) {
  std::shared_lock lock(mutex_);
  std::vector<rdf::Triple> out;
  for (const auto& t : triples_) {
    if (const auto* s = std::get_if<rdf::Iri>(&t.subject); s && s->value == subjectIri) out.push_back(t);
  }
  return out;
}

std::vector<SearchHit> EmbeddedStore::searchLiteral(const std::string& needle) {
  if (needle.empty()) throw std::invalid_argument("search needle must not be empty");
  const auto folded = utf8::foldCase(needle);
  std::shared_lock lock(mutex_);
  std::vector<SearchHit> out;
  for (const auto& t : triples_) {
    const auto* literal = std::get_if<rdf::Literal>(&t.object);
    if (!literal || utf8::foldCase(literal->lexical).find(folded) == std::string::npos) continue;
    out.push_back({std::get<rdf::Iri>(t.subject).value, t});
  }
  return out;
}

std::vector<std::string> EmbeddedStore::listBookmarks() {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& t : triples_) {
    const auto* object = std::get_if<rdf::Iri>(&t.object);
    if (t.predicate.value == rdf::kRdfType && object && object->value == rdf::kBookmarkClass) {
      out.push_back(std::get<rdf::Iri>(t.subject).value);
    }
  }
  return out;
}

std::size_t EmbeddedStore::size() const {
  std::shared_lock lock(mutex_);
  return triples_.size();
}

std::vector<rdf::Triple> EmbeddedStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return triples_;
}

// SparqlStore

namespace {

std::string iriRef(const std::string& iri) { return "<" + iri + ">"; }

std::string stringLiteral(const std::string& text) { return "\"" + rdf::escapeLiteral(text) + "\""; }

const rdf::Iri& requireIri(const sparql::Binding& row, const std::string& var) {
  const auto it = row.find(var);
  if (it == row.end() || !rdf::isIri(it->second)) {
    throw StoreError(StoreErrorCode::EndpointUnreachable, "endpoint returned a non-IRI ?" + var);
  }
  return std::get<rdf::Iri>(it->second);
}

const rdf::Term& requireTerm(const sparql::Binding& row, const std::string& var) {
  const auto it = row.find(var);
  if (it == row.end()) throw StoreError(StoreErrorCode::EndpointUnreachable, "unbound ?" + var);
  return it->second;
}

}  // namespace

SparqlStore::SparqlStore(std::string endpointUrl, int timeoutSeconds)
    : endpointUrl_(std::move(endpointUrl)), timeoutSeconds_(timeoutSeconds) {
  if (!endpointUrl_.starts_with("http://") && !endpointUrl_.starts_with("https://")) {
    throw std::invalid_argument("SPARQL endpoint must be an http(s) URL");
  }
}

std::string SparqlStore::post(const std::string& contentType, const std::string& body,
                              const std::string& accept) {
  const auto schemeEnd = endpointUrl_.find("://") + 3;
  const auto pathStart = endpointUrl_.find('/', schemeEnd);
  const auto origin = endpointUrl_.substr(0, pathStart);
  const auto path = pathStart == std::string::npos ? std::string("/") : endpointUrl_.substr(pathStart);

  httplib::Client client(origin);
  client.set_connection_timeout(timeoutSeconds_);
  client.set_read_timeout(timeoutSeconds_);
  client.set_write_timeout(timeoutSeconds_);
  httplib::Headers headers;
  if (!accept.empty()) headers.emplace("Accept", accept);
  auto res = client.Post(path, headers, body, contentType);
  if (!res) {
    throw StoreError(StoreErrorCode::EndpointUnreachable,
                     "SPARQL endpoint unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw StoreError(StoreErrorCode::EndpointUnreachable,
                     "SPARQL endpoint answered " + std::to_string(res->status));
  }
  return res->body;
}

namespace {

sparql::SelectResult parseResults(const std::string& body) {
  try {
    return sparql::fromResultsJson(nlohmann::json::parse(body));
  } catch (const std::exception& e) {
    throw StoreError(StoreErrorCode::EndpointUnreachable, std::string("bad SPARQL results: ") + e.what());
  }
}

}  // namespace

void SparqlStore::addTriple(const rdf::Triple& triple) {
  validateAnnotation(triple);
  post("application/sparql-update", "INSERT DATA { " + rdf::toNTriples(triple) + " }", "");
}

std::vector<rdf::Triple> SparqlStore::listBySubject(const std::string& subjectIri) {
  const auto body = post("application/sparql-query",
                         "SELECT ?p ?o WHERE { " + iriRef(subjectIri) + " ?p ?o }",
                         "application/sparql-results+json");
  std::vector<rdf::Triple> out;
  for (const auto& row : parseResults(body).rows) {
    out.push_back({rdf::Iri{subjectIri}, requireIri(row, "p"), requireTerm(row, "o")});
  }
  return out;
}

std::vector<SearchHit> SparqlStore::searchLiteral(const std::string& needle) {
  if (needle.empty()) throw std::invalid_argument("search needle must not be empty");
  const auto query = "SELECT DISTINCT ?s ?p ?o WHERE { ?s ?p ?o . FILTER(isLiteral(?o) && "
                     "CONTAINS(LCASE(STR(?o)), LCASE(" + stringLiteral(needle) + "))) }";
  const auto body = post("application/sparql-query", query, "application/sparql-results+json");
  std::vector<SearchHit> out;
  for (const auto& row : parseResults(body).rows) {
    const auto& subject = requireIri(row, "s");
    out.push_back({subject.value, {subject, requireIri(row, "p"), requireTerm(row, "o")}});
  }
  return out;
}

std::vector<std::string> SparqlStore::listBookmarks() {
  const auto query = "SELECT DISTINCT ?s WHERE { ?s " + iriRef(std::string(rdf::kRdfType)) + " " +
                     iriRef(std::string(rdf::kBookmarkClass)) + " }";
  const auto body = post("application/sparql-query", query, "application/sparql-results+json");
  std::vector<std::string> out;
  for (const auto& row : parseResults(body).rows) out.push_back(requireIri(row, "s").value);
  return out;
}

}  // namespace deeplinker
