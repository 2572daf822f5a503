#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

namespace deeplinker {

struct FetchResult {
  std::string body;
  std::string mediaType;  // Content-Type of the final response
};

class FetchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Throws FetchError on transport failure, non-2xx status or limits.
  virtual FetchResult fetch(const std::string& url, const std::string& accept) = 0;
};

struct HttpFetchLimits {
  int timeoutSeconds = 30;
  std::size_t maxBodyBytes = 64u << 20;
  int maxRedirects = 5;
};

// HTTP(S) GET via cpp-httplib. Honors http_proxy / https_proxy / no_proxy.
class HttpFetcher : public Fetcher {
 public:
  explicit HttpFetcher(HttpFetchLimits limits = {}) : limits_(limits) {}
  FetchResult fetch(const std::string& url, const std::string& accept) override;

 private:
  HttpFetchLimits limits_;
};

struct CachedDownload {
  std::filesystem::path bodyPath;  // <cacheDir>/<sha256 of body>
  std::string mediaType;
};

// Download cache keyed by (url, accept). Bodies are stored under their
// content hash; a small JSON record maps the request key to the body. A hit
// never touches the network, so cached links replay offline. Writes go to a
// temporary file and are renamed into place.
class DownloadCache {
 public:
  DownloadCache(std::filesystem::path directory, std::shared_ptr<Fetcher> fetcher);

  const std::filesystem::path& directory() const { return directory_; }
  CachedDownload get(const std::string& url, const std::string& accept) const;

  static std::string requestKey(const std::string& url, const std::string& accept);

 private:
  std::filesystem::path directory_;
  std::shared_ptr<Fetcher> fetcher_;
};

// Write-temp-then-rename.
void writeFileAtomically(const std::filesystem::path& path, const std::string& data);

}  // namespace deeplinker
