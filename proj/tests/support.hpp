#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "silc/cache.hpp"
#include "silc/catalog.hpp"

namespace silc::test {

inline VideoRecord unit_video(VideoId id, std::uint64_t size = 1) {
  return {id, size, 1000, 1.0};
}

/// Videos 1..n with the given size.
inline Catalog unit_catalog(std::size_t n, std::uint64_t size = 1) {
  std::vector<VideoRecord> v;
  for (std::size_t i = 1; i <= n; ++i) v.push_back(unit_video(i, size));
  return Catalog(std::move(v));
}

inline std::unique_ptr<Cache> cache_of(PolicyKind kind, std::uint64_t capacity,
                                       std::span<const VideoRecord> popular = {}) {
  CacheConfig c;
  c.capacity_bytes = capacity;
  c.policy = kind;
  return make_cache(c, popular);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("silc-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace silc::test
