#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "silc/cache.hpp"
#include "silc/lookahead.hpp"

namespace silc {

/// Least Lookahead Frequency.
///
/// Every registered manifest entry adds one to its video's future frequency
/// f; serving the entry removes it again. Eviction takes the cached video
/// with the smallest f, least recently used first among equals.
///
/// State is two hash maps (f for cached and for uncached videos) and a
/// min-heap of (f, last_access, video) snapshots. A snapshot is pushed
/// whenever a cached video's key changes; outdated snapshots stay in the
/// heap and are discarded when they reach the top. The maps are
/// authoritative.
class LlfCache final : public Cache {
 public:
  struct Slot {
    std::int64_t freq = 0;
    std::uint64_t last_access = 0;
    std::uint64_t size = 0;
  };

  explicit LlfCache(std::uint64_t capacity_bytes);

  void register_manifest(UserId user, std::span<const PendingEntry> entries) override;
  void release_user(UserId user) override;
  std::int64_t lookahead_frequency(VideoId video) const override;
  bool tracks_lookahead() const override { return true; }

  bool contains(VideoId video) const override { return in_cache_.contains(video); }
  std::size_t object_count() const override { return in_cache_.size(); }
  std::string_view name() const override { return "llf"; }
  void check_invariants() const override;

  /// argmin f with LRU tie-break. Only discards stale snapshots.
  /// Throws std::logic_error on an empty cache.
  VideoId evict_candidate() const;

  const std::unordered_map<VideoId, Slot>& in_cache() const { return in_cache_; }
  const std::unordered_map<VideoId, std::int64_t>& out_of_cache() const {
    return out_of_cache_;
  }
  /// Sum of f over both maps.
  std::int64_t total_frequency() const;
  const LookaheadBook& book() const { return book_; }
  std::size_t heap_size() const { return heap_.size(); }

 protected:
  bool on_request(UserId user, VideoId video) override;
  bool lookup(VideoId video) override;
  void insert(const VideoRecord& video) override;
  VideoId victim() override { return evict_candidate(); }
  std::uint64_t remove(VideoId video) override;
  bool evicts_incoming() const override { return true; }

 private:
  using Snapshot = std::tuple<std::int64_t, std::uint64_t, VideoId>;

  void adjust(VideoId video, std::int64_t delta);
  void push(VideoId video, const Slot& slot);
  void maybe_compact();

  std::unordered_map<VideoId, Slot> in_cache_;
  std::unordered_map<VideoId, std::int64_t> out_of_cache_;
  mutable std::priority_queue<Snapshot, std::vector<Snapshot>, std::greater<>> heap_;
  LookaheadBook book_;
};

}  // namespace silc
