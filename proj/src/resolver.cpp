#include "deeplinker/resolver.hpp"

#include "deeplinker/annotation.hpp"
#include "deeplinker/convert.hpp"
#include "deeplinker/media.hpp"
#include "deeplinker/utf8.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iterator>

namespace deeplinker {

namespace fs = std::filesystem;

namespace {

constexpr int kMaxLinkNesting = 8;

[[noreturn]] void fail(ResolveErrorCode code, const std::string& detail) {
  throw ResolveError(code, detail);
}

struct MethodArity {
  std::string_view name;
  std::size_t min;
  std::size_t max;
};

constexpr std::array<MethodArity, 9> kMethods{{
    {"child", 1, 1},
    {"index", 1, 1},
    {"line", 1, 1},
    {"substring", 2, 2},
    {"rect", 4, 4},
    {"cssSelector", 1, 1},
    {"download", 1, 2},
    {"property", 1, 1},
    {"to", 1, 1},
}};

bool within(const fs::path& jail, const fs::path& candidate) {
  auto j = jail.begin();
  auto c = candidate.begin();
  for (; j != jail.end(); ++j, ++c) {
    if (c == candidate.end() || *j != *c) return false;
  }
  return true;
}

bool isSafeName(std::string_view name) {
  return !name.empty() && name != "." && name != ".." && name.find('/') == std::string_view::npos &&
         name.find('\0') == std::string_view::npos;
}

std::int64_t modifiedMillis(const fs::path& path) {
  const auto ftime = fs::last_write_time(path);
  const auto sys = std::chrono::file_clock::to_sys(ftime);
  return std::chrono::duration_cast<std::chrono::milliseconds>(sys.time_since_epoch()).count();
}

std::string readAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ResolveErrorCode::NotFound, "cannot open " + path.filename().string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path canonicalOrSelf(const fs::path& p) {
  std::error_code ec;
  auto out = fs::weakly_canonical(p, ec);
  return ec ? p : out;
}

std::vector<std::string> listDirectory(const fs::path& dir, const fs::path& jail) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const auto name = entry.path().filename().string();
    std::error_code canonicalError;
    const auto target = fs::canonical(entry.path(), canonicalError);
    // Dangling links and links leaving the jail are not offered for navigation.
    if (canonicalError || !within(jail, target)) continue;
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

const char* toString(ResolveErrorCode code) {
  switch (code) {
    case ResolveErrorCode::UnknownMethod: return "UnknownMethod";
    case ResolveErrorCode::UnsupportedMethodForKind: return "UnsupportedMethodForKind";
    case ResolveErrorCode::NotFound: return "NotFound";
    case ResolveErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ResolveErrorCode::BadParamCount: return "BadParamCount";
    case ResolveErrorCode::BadParamFormat: return "BadParamFormat";
    case ResolveErrorCode::PathEscapesRoot: return "PathEscapesRoot";
    case ResolveErrorCode::ConversionUnavailable: return "ConversionUnavailable";
    case ResolveErrorCode::DownloadFailed: return "DownloadFailed";
    case ResolveErrorCode::SelectorNoMatch: return "SelectorNoMatch";
  }
  return "Unknown";
}

std::uint64_t parseIndex(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const bool digitsOnly = !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (!digitsOnly || ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ResolveErrorCode::BadParamFormat,
         std::string(what) + " must be a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

Resolver::Resolver(ResolverConfig config, std::shared_ptr<AnnotationStore> store,
                   std::shared_ptr<Fetcher> fetcher)
    : config_(std::move(config)),
      rootCanonical_(canonicalOrSelf(config_.rootDir)),
      uploadCanonical_(canonicalOrSelf(config_.uploadDir)),
      store_(std::move(store)),
      cache_(config_.cacheDir, std::move(fetcher)) {}

Resource Resolver::rootResource(std::string_view entryName) const {
  if (entryName == "filesystem") {
    return fileResource(rootCanonical_, rootCanonical_, rootCanonical_.filename().string());
  }
  if (entryName == "remote") {
    RemotePayload remote;
    std::error_code ec;
    if (fs::is_directory(config_.uploadDir, ec)) {
      remote.uploads = listDirectory(config_.uploadDir, uploadCanonical_);
    }
    return remote;
  }
  if (entryName == "bookmarks") {
    CollectionPayload bookmarks;
    if (store_) {
      for (const auto& iri : store_->listBookmarks()) {
        if (!iri.starts_with(config_.baseIri)) continue;
        try {
          auto link = parseDeepLink(std::string_view(iri).substr(config_.baseIri.size()));
          bookmarks.entries.push_back({serializeDeepLink(link), nullptr, std::move(link)});
        } catch (const LinkError&) {
          // Not one of ours.
        }
      }
    }
    return bookmarks;
  }
  fail(ResolveErrorCode::NotFound, "unknown entry '" + std::string(entryName) + "'");
}

Resource Resolver::fileResource(const fs::path& path, const fs::path& jail, std::string name,
                                std::string mediaTypeOverride) const {
  std::error_code ec;
  const auto status = fs::symlink_status(path, ec);
  if (ec || !fs::exists(status)) fail(ResolveErrorCode::NotFound, "no such file '" + name + "'");
  const auto canonical = fs::canonical(path, ec);
  if (ec) fail(ResolveErrorCode::NotFound, "cannot resolve '" + name + "'");
  if (!within(jail, canonical)) {
    fail(ResolveErrorCode::PathEscapesRoot, "'" + name + "' resolves outside the root");
  }

  FilePayload file;
  file.jail = jail;
  file.meta.name = std::move(name);
  file.meta.absolutePath = canonical.string();
  file.meta.isDirectory = fs::is_directory(canonical);
  file.meta.modifiedMs = modifiedMillis(canonical);
  if (file.meta.isDirectory) {
    file.meta.mediaType = std::string(media::kDirectory);
    file.entries = listDirectory(canonical, jail);
  } else {
    file.meta.sizeBytes = fs::file_size(canonical);
    file.meta.mediaType = mediaTypeOverride.empty() ? media::forFileName(file.meta.name)
                                                    : media::essence(mediaTypeOverride);
  }
  return file;
}

Resource Resolver::childOf(const Resource& resource, const std::string& name, int depth) const {
  switch (resource.kind()) {
    case ResourceKind::File: {
      const auto& file = resource.as<FilePayload>();
      if (!file.meta.isDirectory) {
        if (name != "content") fail(ResolveErrorCode::NotFound, "a file only has 'content'");
        const fs::path path = file.meta.absolutePath;
        auto bytes = std::make_shared<const std::string>(readAll(path));
        ++contentReads_;
        return BinaryPayload{bytes, media::sniff(*bytes, file.meta.mediaType)};
      }
      if (!isSafeName(name)) {
        fail(ResolveErrorCode::PathEscapesRoot, "'" + name + "' is not a plain entry name");
      }
      return fileResource(fs::path(file.meta.absolutePath) / name, file.jail, name);
    }
    case ResourceKind::Remote: {
      if (!isSafeName(name)) {
        fail(ResolveErrorCode::PathEscapesRoot, "'" + name + "' is not a plain entry name");
      }
      return fileResource(uploadCanonical_ / name, uploadCanonical_, name);
    }
    case ResourceKind::Map: {
      if (auto value = resource.as<MapPayload>().find(name)) return *value;
      fail(ResolveErrorCode::NotFound, "no key '" + name + "'");
    }
    case ResourceKind::Collection: {
      for (const auto& entry : resource.as<CollectionPayload>().entries) {
        if (entry.label != name) continue;
        if (entry.target) return resolveNested(*entry.target, depth + 1);
        return *entry.value;
      }
      fail(ResolveErrorCode::NotFound, "no entry '" + name + "'");
    }
    case ResourceKind::Json: {
      const auto& value = resource.as<JsonPayload>().value;
      if (!value.is_object()) {
        fail(ResolveErrorCode::UnsupportedMethodForKind, "child applies to JSON objects only");
      }
      const auto it = value.find(name);
      if (it == value.end()) fail(ResolveErrorCode::NotFound, "no key '" + name + "'");
      return jsonValueResource(*it);
    }
    default:
      fail(ResolveErrorCode::UnsupportedMethodForKind,
           std::string("child does not apply to ") + toString(resource.kind()));
  }
}

Resource Resolver::indexOf(const Resource& resource, const std::string& param, int depth) const {
  const auto i = parseIndex(param, "index");
  const auto outOfRange = [&](std::size_t size) {
    fail(ResolveErrorCode::IndexOutOfRange,
         "index " + param + " out of range [0, " + std::to_string(size) + ")");
  };
  switch (resource.kind()) {
    case ResourceKind::Collection: {
      const auto& entries = resource.as<CollectionPayload>().entries;
      if (i >= entries.size()) outOfRange(entries.size());
      const auto& entry = entries[i];
      if (entry.target) return resolveNested(*entry.target, depth + 1);
      return *entry.value;
    }
    case ResourceKind::Powerpoint: {
      const auto& presentation = resource.as<PowerpointPayload>().presentation;
      if (i >= presentation->slides.size()) outOfRange(presentation->slides.size());
      return SlidePayload{presentation, static_cast<std::size_t>(i)};
    }
    case ResourceKind::Json: {
      const auto& value = resource.as<JsonPayload>().value;
      if (!value.is_array()) {
        fail(ResolveErrorCode::UnsupportedMethodForKind, "index applies to JSON arrays only");
      }
      if (i >= value.size()) outOfRange(value.size());
      return jsonValueResource(value[i]);
    }
    default:
      fail(ResolveErrorCode::UnsupportedMethodForKind,
           std::string("index does not apply to ") + toString(resource.kind()));
  }
}

Resource Resolver::download(const Segment& segment) const {
  const auto& url = segment.params[0];
  const std::string accept = segment.params.size() > 1 ? segment.params[1] : "*/*";
  if (!url.starts_with("http://") && !url.starts_with("https://")) {
    fail(ResolveErrorCode::BadParamFormat, "download needs an http(s) URL");
  }
  CachedDownload cached;
  try {
    cached = cache_.get(url, accept);
  } catch (const FetchError& e) {
    fail(ResolveErrorCode::DownloadFailed, e.what());
  } catch (const std::exception& e) {
    fail(ResolveErrorCode::DownloadFailed, std::string("download cache: ") + e.what());
  }
  const auto jail = canonicalOrSelf(cache_.directory());
  return fileResource(cached.bodyPath, jail, cached.bodyPath.filename().string(),
                      cached.mediaType.empty() ? std::string(media::kOctetStream) : cached.mediaType);
}

Resource Resolver::applySegment(const Resource& resource, const Segment& segment) const {
  return applySegmentAt(resource, segment, 0);
}

Resource Resolver::applySegmentAt(const Resource& resource, const Segment& segment,
                                  int depth) const {
  const auto* method = std::find_if(kMethods.begin(), kMethods.end(),
                                    [&](const MethodArity& m) { return m.name == segment.method; });
  if (method == kMethods.end()) {
    fail(ResolveErrorCode::UnknownMethod, "unknown method '" + segment.method + "'");
  }
  const auto& params = segment.params;
  if (params.size() < method->min || params.size() > method->max) {
    fail(ResolveErrorCode::BadParamCount,
         segment.method + " takes " + std::to_string(method->min) +
             (method->max != method->min ? "-" + std::to_string(method->max) : "") +
             " parameter(s), got " + std::to_string(params.size()));
  }

  try {
    if (segment.method == "child") return childOf(resource, params[0], depth);
    if (segment.method == "index") return indexOf(resource, params[0], depth);

    if (segment.method == "line") {
      const auto* text = resource.get<TextPayload>();
      if (!text) fail(ResolveErrorCode::UnsupportedMethodForKind, "line applies to String only");
      const auto i = parseIndex(params[0], "line");
      const auto lines = text->lines();
      if (i >= lines.size()) {
        fail(ResolveErrorCode::IndexOutOfRange,
             "line " + params[0] + " out of range [0, " + std::to_string(lines.size()) + ")");
      }
      TextPayload out;
      out.text = std::string(lines[i]);
      out.source = std::make_shared<const TextPayload>(*text);
      out.focusLine = static_cast<std::size_t>(i);
      return out;
    }

    if (segment.method == "substring") {
      const auto* text = resource.get<TextPayload>();
      if (!text) fail(ResolveErrorCode::UnsupportedMethodForKind, "substring applies to String only");
      const auto start = parseIndex(params[0], "substring start");
      const auto end = parseIndex(params[1], "substring end");
      const auto codepoints = utf8::decode(text->text);
      if (start > end || end > codepoints.size()) {
        fail(ResolveErrorCode::IndexOutOfRange,
             "substring [" + params[0] + ", " + params[1] + ") outside [0, " +
                 std::to_string(codepoints.size()) + "]");
      }
      TextPayload out;
      out.text = utf8::encode(std::u32string_view(codepoints).substr(start, end - start));
      out.source = std::make_shared<const TextPayload>(*text);
      out.focusRange = std::make_pair(static_cast<std::size_t>(start), static_cast<std::size_t>(end));
      return out;
    }

    if (segment.method == "rect") {
      const auto* image = resource.get<ImagePayload>();
      if (!image) fail(ResolveErrorCode::UnsupportedMethodForKind, "rect applies to Image only");
      const auto x = parseIndex(params[0], "x");
      const auto y = parseIndex(params[1], "y");
      const auto w = parseIndex(params[2], "width");
      const auto h = parseIndex(params[3], "height");
      if (w == 0 || h == 0) fail(ResolveErrorCode::BadParamFormat, "rect needs a positive size");
      if (x + w > image->width || y + h > image->height) {
        fail(ResolveErrorCode::BadParamFormat,
             "rect exceeds the " + std::to_string(image->width) + "x" +
                 std::to_string(image->height) + " image");
      }
      return RectPayload{static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                         static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h),
                         std::make_shared<const ImagePayload>(*image)};
    }

    if (segment.method == "cssSelector") return selectCss(resource, params[0]);

    if (segment.method == "download") {
      if (resource.kind() != ResourceKind::Remote) {
        fail(ResolveErrorCode::UnsupportedMethodForKind, "download applies to Remote only");
      }
      return download(segment);
    }

    if (segment.method == "property") {
      for (auto& [key, value] : properties(resource)) {
        if (key == params[0]) return textResource(std::move(value));
      }
      fail(ResolveErrorCode::NotFound, "no property '" + params[0] + "'");
    }

    // to@format
    return convert(resource, params[0]);
  } catch (const fs::filesystem_error& e) {
    fail(ResolveErrorCode::NotFound, e.code().message());
  }
}

Resource Resolver::resolve(const DeepLink& link) const { return resolveNested(link, 0); }

Resource Resolver::resolveNested(const DeepLink& link, int depth) const {
  if (depth > kMaxLinkNesting) fail(ResolveErrorCode::BadParamFormat, "link nesting too deep");
  if (link.empty()) fail(ResolveErrorCode::NotFound, "empty link");
  const auto& first = link.segments.front();
  if (first.method != "child" || first.params.size() != 1) {
    fail(ResolveErrorCode::NotFound, "a link starts with an entry name");
  }
  std::size_t i = 0;
  try {
    Resource current = rootResource(first.params[0]);
    for (i = 1; i < link.size(); ++i) current = applySegmentAt(current, link.segments[i], depth);
    return current;
  } catch (ResolveError& e) {
    e.setAtSegment(std::min(i, link.size() - 1));
    throw;
  }
}

}  // namespace deeplinker
