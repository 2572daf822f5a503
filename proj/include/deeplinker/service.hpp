#pragma once

#include "deeplinker/annotation.hpp"
#include "deeplinker/fetch.hpp"
#include "deeplinker/resolver.hpp"

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace deeplinker {

struct ServiceConfig {
  std::filesystem::path rootDir;
  std::string bindAddress = "127.0.0.1";
  int port = 7276;
  std::string baseIri;  // empty: http://<bind>:<port>
  std::optional<std::string> sparqlEndpoint;
  std::filesystem::path uploadDir;
  std::filesystem::path downloadCacheDir;
  std::filesystem::path journalPath;
  std::optional<std::filesystem::path> assetsDir;  // overrides the built-in assets
  std::string sparqlMountPath = "/fuseki/annotation";
  std::size_t maxUploadBytes = 64u << 20;

  // Fills defaults and checks invariants. Throws std::invalid_argument.
  void finalize();
};

struct HttpResponse {
  int status = 200;
  std::string contentType;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

using FormFields = std::multimap<std::string, std::string>;

class Service {
 public:
  // Without a store the configuration decides: SPARQL client when an
  // endpoint is set, otherwise the embedded journal-backed store.
  explicit Service(ServiceConfig config, std::shared_ptr<Fetcher> fetcher = nullptr,
                   std::shared_ptr<AnnotationStore> store = nullptr);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // `rawTarget` is the request target as sent, query string included.
  HttpResponse handleGet(std::string_view rawTarget, std::string_view accept) const;
  // Fields: subject (link path or absolute IRI), predicate, object, type
  // (literal | iri), optional lang or datatype.
  HttpResponse handleAnnotationPost(const FormFields& form, std::string_view accept);
  HttpResponse handleBookmarkPost(const FormFields& form, std::string_view accept);
  HttpResponse handleUpload(const std::vector<std::pair<std::string, std::string>>& fileParts);
  HttpResponse handleSparql(std::string_view method, std::string_view contentType,
                            const std::string& body, const FormFields& params) const;

  // Binds the listening socket; false on failure. Port 0 picks a free port.
  bool bind();
  // Serves until stop(); call after bind().
  void run();
  void stop();
  int boundPort() const { return boundPort_; }

  const ServiceConfig& config() const { return config_; }
  AnnotationStore& store() { return *store_; }
  const Resolver& resolver() const { return *resolver_; }

  std::string subjectIri(const DeepLink& link) const;

 private:
  HttpResponse handleLink(std::string_view path, std::string_view accept) const;
  HttpResponse handleIndex() const;
  HttpResponse handleSearch(std::string_view query, std::string_view accept) const;
  HttpResponse handleAsset(std::string_view name) const;
  std::optional<DeepLink> subjectLink(const std::string& subject) const;

  ServiceConfig config_;
  std::shared_ptr<AnnotationStore> store_;
  std::shared_ptr<EmbeddedStore> embedded_;  // set in embedded mode; backs the SPARQL mount
  std::unique_ptr<Resolver> resolver_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> running_{false};
  std::atomic<bool> stopRequested_{false};
  int boundPort_ = 0;
};

// Query-string parsing with '+' as space.
FormFields parseQueryString(std::string_view query);

}  // namespace deeplinker
