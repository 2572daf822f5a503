#pragma once

#include "fixtures.hpp"

#include "deeplinker/service.hpp"

#include <httplib.h>

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace testsupport {

// Refuses every request; proves that cached downloads replay offline.
class OfflineFetcher : public deeplinker::Fetcher {
 public:
  deeplinker::FetchResult fetch(const std::string& url, const std::string&) override {
    ++calls;
    throw deeplinker::FetchError("offline: " + url);
  }
  std::atomic<int> calls{0};
};

// Port 0, state under `state`, download cache seeded from the fixture cache.
deeplinker::ServiceConfig fixtureConfig(const TempDir& state,
                                        const std::filesystem::path& root = fixtureTree());

// A Service listening on an ephemeral port, served from a background thread.
class ServiceRunner {
 public:
  explicit ServiceRunner(deeplinker::ServiceConfig config,
                         std::shared_ptr<deeplinker::Fetcher> fetcher = std::make_shared<OfflineFetcher>(),
                         std::shared_ptr<deeplinker::AnnotationStore> store = nullptr);
  ~ServiceRunner();
  ServiceRunner(const ServiceRunner&) = delete;
  ServiceRunner& operator=(const ServiceRunner&) = delete;

  deeplinker::Service& service() { return *service_; }
  int port() const { return service_->boundPort(); }
  std::string baseUrl() const { return "http://127.0.0.1:" + std::to_string(port()); }
  httplib::Client client() const;

 private:
  std::unique_ptr<deeplinker::Service> service_;
  std::thread thread_;
};

httplib::Result get(httplib::Client& client, const std::string& path,
                    const std::string& accept = "text/html");

struct CrawlReport {
  std::vector<std::string> visited;  // in BFS order
  std::vector<std::pair<std::string, int>> failures;
  std::size_t maxDepthReached = 0;
};

// Breadth-first over rel=child anchors, starting at `start` (depth 0).
CrawlReport crawl(httplib::Client& client, const std::string& start, std::size_t maxDepth);

}  // namespace testsupport
