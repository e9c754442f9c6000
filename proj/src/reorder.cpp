#include "silc/reorder.hpp"

#include <algorithm>
#include <numeric>

namespace silc {

ReorderDecision reorder_manifest(std::span<const VideoId> entries,
                                 const CacheView& cached,
                                 const FrequencyView& frequency) {
  ReorderDecision d;
  d.original.assign(entries.begin(), entries.end());
  const std::size_t n = entries.size();

  std::unordered_map<VideoId, std::int64_t> own;
  for (auto v : entries) ++own[v];

  struct Key {
    int group;
    std::int64_t freq;
  };
  std::vector<Key> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const VideoId v = entries[i];
    const std::int64_t f = frequency(v);
    if (cached(v))
      keys[i] = {0, f};
    else if (f > own[v])
      keys[i] = {1, f};
    else
      keys[i] = {2, 0};
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a].group != keys[b].group) return keys[a].group < keys[b].group;
    return keys[a].freq > keys[b].freq;
  });

  d.reordered.resize(n);
  d.displacement.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    d.reordered[pos] = entries[order[pos]];
    d.displacement[order[pos]] = static_cast<int>(pos) - static_cast<int>(order[pos]);
  }
  return d;
}

ReorderDecision reorder_manifest(const ManifestFile& manifest,
                                 const std::unordered_set<VideoId>& cache_view,
                                 const std::unordered_map<VideoId, std::int64_t>& lookahead_freq) {
  return reorder_manifest(
      manifest.entries, [&](VideoId v) { return cache_view.contains(v); },
      [&](VideoId v) {
        auto it = lookahead_freq.find(v);
        return it == lookahead_freq.end() ? std::int64_t{0} : it->second;
      });
}

void accumulate_displacement(DisplacementHistogram& histogram,
                             const ReorderDecision& decision) {
  for (int x : decision.displacement) ++histogram[x];
}

DisplacementHistogram displacement_histogram(std::span<const ReorderDecision> decisions) {
  DisplacementHistogram h;
  for (const auto& d : decisions) accumulate_displacement(h, d);
  return h;
}

}  // namespace silc
