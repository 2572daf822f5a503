#include "deeplinker/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>

namespace {

deeplinker::Service* gService = nullptr;

void onSignal(int) {
  if (gService) gService->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DeepLinker: browse, address and annotate fragments of local files via deep links"};
  app.set_version_flag("--version", "deeplinker 1.0.0");

  deeplinker::ServiceConfig config;
  std::string root;
  std::string stateDir = ".deeplinker";
  std::string uploadDir;
  std::string cacheDir;
  std::string journal;
  std::string assetsDir;
  std::string sparqlEndpoint;
  std::string resolvePath;
  std::string accept = "text/html";

  app.add_option("--root", root, "Directory served under /filesystem")
      ->required()
      ->envname("DEEPLINKER_ROOT");
  app.add_option("--port", config.port, "Listening port (0 picks a free one)")
      ->capture_default_str()
      ->check(CLI::Range(0, 65535))
      ->envname("DEEPLINKER_PORT");
  app.add_option("--bind", config.bindAddress, "Listening address")
      ->capture_default_str()
      ->envname("DEEPLINKER_BIND");
  app.add_option("--base-iri", config.baseIri,
                 "Prefix of annotation subject IRIs (default http://<bind>:<port>)")
      ->envname("DEEPLINKER_BASE_IRI");
  app.add_option("--sparql-endpoint", sparqlEndpoint,
                 "Store annotations in this SPARQL 1.1 endpoint instead of the local journal")
      ->envname("DEEPLINKER_SPARQL_ENDPOINT");
  app.add_option("--state-dir", stateDir, "Default location for uploads, cache and journal")
      ->capture_default_str()
      ->envname("DEEPLINKER_STATE_DIR");
  app.add_option("--upload-dir", uploadDir, "Upload directory (default <state-dir>/uploads)")
      ->envname("DEEPLINKER_UPLOAD_DIR");
  app.add_option("--cache-dir", cacheDir, "Download cache (default <state-dir>/cache)")
      ->envname("DEEPLINKER_CACHE_DIR");
  app.add_option("--journal", journal, "Annotation journal (default <state-dir>/annotations.nt)")
      ->envname("DEEPLINKER_JOURNAL");
  app.add_option("--assets-dir", assetsDir, "Serve /assets/* from this directory first")
      ->envname("DEEPLINKER_ASSETS_DIR");
  app.add_option("--resolve", resolvePath,
                 "Print the representation of one deep link and exit without serving");
  app.add_option("--accept", accept, "Accept header used with --resolve")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::filesystem::path state = stateDir;
  config.rootDir = root;
  config.uploadDir = uploadDir.empty() ? state / "uploads" : std::filesystem::path(uploadDir);
  config.downloadCacheDir = cacheDir.empty() ? state / "cache" : std::filesystem::path(cacheDir);
  config.journalPath = journal.empty() ? state / "annotations.nt" : std::filesystem::path(journal);
  if (!sparqlEndpoint.empty()) config.sparqlEndpoint = sparqlEndpoint;
  if (!assetsDir.empty()) config.assetsDir = assetsDir;

  std::unique_ptr<deeplinker::Service> service;
  try {
    service = std::make_unique<deeplinker::Service>(config);
  } catch (const std::exception& e) {
    std::cerr << "deeplinker: " << e.what() << "\n";
    return 1;
  }

  if (!resolvePath.empty()) {
    const auto res = service->handleGet(resolvePath, accept);
    if (res.status != 200) {
      std::cerr << "deeplinker: " << res.status << "\n" << res.body;
      return 1;
    }
    std::cout << res.body;
    return std::cout.good() ? 0 : 1;
  }

  if (!service->bind()) {
    std::cerr << "deeplinker: cannot listen on " << service->config().bindAddress << ":"
              << service->config().port << "\n";
    return 1;
  }
  gService = service.get();
  std::signal(SIGINT, onSignal);
  std::signal(SIGTERM, onSignal);
  std::cout << "deeplinker: serving " << service->config().rootDir.string() << " on http://"
            << service->config().bindAddress << ":" << service->boundPort() << "/" << std::endl;
  service->run();
  gService = nullptr;
  return 0;
}
