#pragma once

#include "deeplinker/error.hpp"
#include "deeplinker/fetch.hpp"
#include "deeplinker/link.hpp"
#include "deeplinker/resource.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

namespace deeplinker {

class AnnotationStore;

inline constexpr std::array<std::string_view, 3> kEntryNames{"filesystem", "remote", "bookmarks"};

struct ResolverConfig {
  std::filesystem::path rootDir;
  std::filesystem::path uploadDir;
  std::filesystem::path cacheDir;
  std::string baseIri;  // used to map bookmark IRIs back to deep links
};

// Evaluates deep links by folding `applySegment` over the segments, starting
// from the entry resource named by the first segment.
//
// Indexing is zero-based everywhere: `index@3` is the fourth slide and
// `line@2` the third line.
class Resolver {
 public:
  Resolver(ResolverConfig config, std::shared_ptr<AnnotationStore> store,
           std::shared_ptr<Fetcher> fetcher);

  Resource rootResource(std::string_view entryName) const;
  Resource applySegment(const Resource& resource, const Segment& segment) const;
  // Throws ResolveError stamped with the index of the failing segment.
  Resource resolve(const DeepLink& link) const;

  const ResolverConfig& config() const { return config_; }
  // Number of times file content was read from disk.
  std::size_t contentReads() const { return contentReads_.load(); }

 private:
  Resource resolveNested(const DeepLink& link, int depth) const;
  Resource applySegmentAt(const Resource& resource, const Segment& segment, int depth) const;
  Resource fileResource(const std::filesystem::path& path, const std::filesystem::path& jail,
                        std::string name, std::string mediaTypeOverride = {}) const;
  Resource childOf(const Resource& resource, const std::string& name, int depth) const;
  Resource indexOf(const Resource& resource, const std::string& param, int depth) const;
  Resource download(const Segment& segment) const;

  ResolverConfig config_;
  std::filesystem::path rootCanonical_;
  std::filesystem::path uploadCanonical_;
  std::shared_ptr<AnnotationStore> store_;
  DownloadCache cache_;
  mutable std::atomic<std::size_t> contentReads_{0};
};

// Base-10 non-negative integer, digits only. Throws BadParamFormat.
std::uint64_t parseIndex(std::string_view text, std::string_view what);

}  // namespace deeplinker
