#pragma once

#include "deeplinker/link.hpp"
#include "deeplinker/rdf.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace deeplinker {

enum class StoreErrorCode { StorageFailure, EndpointUnreachable };

class StoreError : public std::runtime_error {
 public:
  StoreError(StoreErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}
  StoreErrorCode code() const { return code_; }

 private:
  StoreErrorCode code_;
};

struct SearchHit {
  std::string subject;
  rdf::Triple triple;
  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Statements about deep links. Subjects are absolute IRIs (base IRI plus the
// serialized link); a single default graph; set semantics.
class AnnotationStore {
 public:
  virtual ~AnnotationStore() = default;

  // Throws std::invalid_argument when the triple is not Iri/Iri/(Iri|Literal).
  virtual void addTriple(const rdf::Triple& triple) = 0;
  // Insertion order.
  virtual std::vector<rdf::Triple> listBySubject(const std::string& subjectIri) = 0;
  // Case-insensitive substring match over literal lexical forms.
  // Throws std::invalid_argument on an empty needle.
  virtual std::vector<SearchHit> searchLiteral(const std::string& needle) = 0;
  virtual std::vector<std::string> listBookmarks() = 0;

  void addBookmark(const DeepLink& link, const std::string& baseIri);
  static rdf::Triple bookmarkTriple(const std::string& subjectIri);
};

// Checks the store's triple shape; throws std::invalid_argument.
void validateAnnotation(const rdf::Triple& triple);

// In-memory index plus an append-only N-Triples journal.
class EmbeddedStore : public AnnotationStore {
 public:
  // Replays the journal when present. Without a path the store is volatile.
  explicit EmbeddedStore(std::optional<std::filesystem::path> journal = std::nullopt);
  ~EmbeddedStore() override;

  EmbeddedStore(const EmbeddedStore&) = delete;
  EmbeddedStore& operator=(const EmbeddedStore&) = delete;

  void addTriple(const rdf::Triple& triple) override;
  std::vector<rdf::Triple> listBySubject(const std::string& subjectIri) override;
  std::vector<SearchHit> searchLiteral(const std::string& needle) override;
  std::vector<std::string> listBookmarks() override;

  std::size_t size() const;
  std::vector<rdf::Triple> snapshot() const;

 private:
  // Returns false when already present. Caller holds the write lock.
  bool insertLocked(const rdf::Triple& triple);

  mutable std::shared_mutex mutex_;
  std::vector<rdf::Triple> triples_;
  std::unordered_set<std::string> keys_;
  std::optional<std::filesystem::path> journalPath_;
  std::FILE* journal_ = nullptr;
};

// SPARQL 1.1 protocol client: queries and updates are POSTed to the endpoint
// as application/sparql-query and application/sparql-update.
class SparqlStore : public AnnotationStore {
 public:
  explicit SparqlStore(std::string endpointUrl, int timeoutSeconds = 10);

  void addTriple(const rdf::Triple& triple) override;
  std::vector<rdf::Triple> listBySubject(const std::string& subjectIri) override;
  std::vector<SearchHit> searchLiteral(const std::string& needle) override;
  std::vector<std::string> listBookmarks() override;

 private:
  std::string post(const std::string& contentType, const std::string& body,
                   const std::string& accept);

  std::string endpointUrl_;
  int timeoutSeconds_;
};

}  // namespace deeplinker
