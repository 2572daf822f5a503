#include "deeplinker/fetch.hpp"

#include "deeplinker/hash.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace deeplinker {

namespace fs = std::filesystem;

namespace {

struct UrlParts {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string target;  // path + query, "/" when empty
};

std::optional<UrlParts> splitUrl(const std::string& url) {
  const auto schemeEnd = url.find("://");
  if (schemeEnd == std::string::npos) return std::nullopt;
  UrlParts out;
  out.scheme = url.substr(0, schemeEnd);
  for (auto& c : out.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  const auto authorityStart = schemeEnd + 3;
  const auto pathStart = url.find_first_of("/?#", authorityStart);
  auto authority = url.substr(authorityStart, pathStart == std::string::npos ? std::string::npos
                                                                             : pathStart - authorityStart);
  if (const auto at = authority.rfind('@'); at != std::string::npos) authority = authority.substr(at + 1);
  out.port = out.scheme == "https" ? 443 : 80;
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (...) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  out.host = authority;
  out.target = pathStart == std::string::npos ? "/" : url.substr(pathStart);
  if (const auto hash = out.target.find('#'); hash != std::string::npos) out.target.erase(hash);
  if (out.target.empty() || out.target.front() != '/') out.target.insert(0, "/");
  return out;
}

const char* envFirst(std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (const char* v = std::getenv(name); v && *v) return v;
  }
  return nullptr;
}

bool bypassProxy(const std::string& host) {
  const char* noProxy = envFirst({"no_proxy", "NO_PROXY"});
  if (!noProxy) return false;
  std::stringstream list(noProxy);
  std::string item;
  while (std::getline(list, item, ',')) {
    while (!item.empty() && item.front() == ' ') item.erase(0, 1);
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (item.empty()) continue;
    if (item == "*") return true;
    if (item.front() == '.') item.erase(0, 1);
    if (host == item || (host.size() > item.size() && host.ends_with("." + item))) return true;
  }
  return false;
}

void applyProxy(httplib::Client& client, const UrlParts& url) {
  if (bypassProxy(url.host)) return;
  const char* proxy = url.scheme == "https" ? envFirst({"https_proxy", "HTTPS_PROXY"})
                                            : envFirst({"http_proxy", "HTTP_PROXY"});
  if (!proxy) return;
  std::string value = proxy;
  if (value.find("://") == std::string::npos) value = "http://" + value;
  if (const auto parts = splitUrl(value)) client.set_proxy(parts->host, parts->port);
}

std::string resolveLocation(const UrlParts& base, const std::string& location) {
  if (location.find("://") != std::string::npos) return location;
  const std::string origin = base.scheme + "://" + base.host + ":" + std::to_string(base.port);
  if (location.rfind("//", 0) == 0) return base.scheme + ":" + location;
  if (!location.empty() && location.front() == '/') return origin + location;
  auto dir = base.target.substr(0, base.target.find('?'));
  dir = dir.substr(0, dir.rfind('/') + 1);
  return origin + dir + location;
}

}  // namespace

FetchResult HttpFetcher::fetch(const std::string& url, const std::string& accept) {
  std::string current = url;
  for (int hop = 0; hop <= limits_.maxRedirects; ++hop) {
    const auto parts = splitUrl(current);
    if (!parts) throw FetchError("unsupported URL '" + current + "'");
    httplib::Client client(parts->scheme + "://" + parts->host + ":" + std::to_string(parts->port));
    client.set_url_encode(false);
    client.set_connection_timeout(limits_.timeoutSeconds, 0);
    client.set_read_timeout(limits_.timeoutSeconds, 0);
    client.set_write_timeout(limits_.timeoutSeconds, 0);
    client.set_follow_location(false);
    applyProxy(client, *parts);

    std::string body;
    bool tooLarge = false;
    const httplib::Headers headers{{"Accept", accept.empty() ? "*/*" : accept}};
    auto response = client.Get(
        parts->target, headers,
        [&](const char* data, std::size_t length) {
          if (body.size() + length > limits_.maxBodyBytes) {
            tooLarge = true;
            return false;
          }
          body.append(data, length);
          return true;
        });
    if (tooLarge) throw FetchError("response body exceeds " + std::to_string(limits_.maxBodyBytes) + " bytes");
    if (!response) throw FetchError("request to " + current + " failed: " + httplib::to_string(response.error()));
    const int status = response->status;
    if (status >= 300 && status < 400 && response->has_header("Location")) {
      current = resolveLocation(*parts, response->get_header_value("Location"));
      continue;
    }
    if (status < 200 || status >= 300) {
      throw FetchError(current + " answered HTTP " + std::to_string(status));
    }
    return FetchResult{std::move(body), response->get_header_value("Content-Type")};
  }
  throw FetchError("too many redirects for " + url);
}

void writeFileAtomically(const fs::path& path, const std::string& data) {
  static std::atomic<unsigned> counter{0};
  const auto tmp = path.parent_path() /
                   (path.filename().string() + ".tmp." +
                    std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                    std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

DownloadCache::DownloadCache(fs::path directory, std::shared_ptr<Fetcher> fetcher)
    : directory_(std::move(directory)), fetcher_(std::move(fetcher)) {}

std::string DownloadCache::requestKey(const std::string& url, const std::string& accept) {
  return sha256Hex(url + "\n" + accept);
}

CachedDownload DownloadCache::get(const std::string& url, const std::string& accept) const {
  const auto record = directory_ / (requestKey(url, accept) + ".json");
  if (fs::exists(record)) {
    std::ifstream in(record);
    const auto meta = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (meta.is_object() && meta.contains("sha256")) {
      const auto body = directory_ / meta["sha256"].get<std::string>();
      if (fs::exists(body)) return {body, meta.value("mediaType", "")};
    }
  }
  if (!fetcher_) throw FetchError("not cached and no fetcher configured: " + url);
  auto result = fetcher_->fetch(url, accept);
  fs::create_directories(directory_);
  const auto digest = sha256Hex(result.body);
  const auto body = directory_ / digest;
  if (!fs::exists(body)) writeFileAtomically(body, result.body);
  const nlohmann::json meta{{"url", url},
                            {"accept", accept},
                            {"mediaType", result.mediaType},
                            {"sha256", digest}};
  writeFileAtomically(record, meta.dump(2) + "\n");
  return {body, result.mediaType};
}

}  // namespace deeplinker
