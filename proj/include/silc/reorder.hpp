#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "silc/catalog.hpp"

namespace silc {

struct ReorderDecision {
  std::vector<VideoId> original;
  std::vector<VideoId> reordered;
  /// New index minus old index, listed in original order.
  std::vector<int> displacement;
};

using CacheView = std::function<bool(VideoId)>;
using FrequencyView = std::function<std::int64_t(VideoId)>;

/// Permutes one manifest into three stable groups:
///   1. entries already cached, by descending cross-user frequency;
///   2. uncached entries some other active manifest also wants
///      (frequency above this manifest's own count), by descending frequency;
///   3. everything else, in original order.
/// `frequency` must already include this manifest's own entries.
ReorderDecision reorder_manifest(std::span<const VideoId> entries,
                                 const CacheView& cached,
                                 const FrequencyView& frequency);

ReorderDecision reorder_manifest(const ManifestFile& manifest,
                                 const std::unordered_set<VideoId>& cache_view,
                                 const std::unordered_map<VideoId, std::int64_t>& lookahead_freq);

using DisplacementHistogram = std::map<int, std::uint64_t>;

void accumulate_displacement(DisplacementHistogram& histogram,
                             const ReorderDecision& decision);
DisplacementHistogram displacement_histogram(std::span<const ReorderDecision> decisions);

}  // namespace silc
