#pragma once

#include <cstdint>
#include <deque>
#include <list>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "silc/cache.hpp"
#include "silc/lookahead.hpp"
#include "silc/rng.hpp"

namespace silc {

/// Furthest-in-Future: evicts the video whose next use in the registered
/// lookahead is furthest away. Videos absent from the lookahead are
/// infinitely far; ties go to the least recently used.
class FifCache final : public Cache {
 public:
  explicit FifCache(std::uint64_t capacity_bytes);

  void register_manifest(UserId user, std::span<const PendingEntry> entries) override;
  void release_user(UserId user) override;
  std::int64_t lookahead_frequency(VideoId video) const override {
    return book_.count(video);
  }
  bool tracks_lookahead() const override { return true; }

  bool contains(VideoId video) const override { return cached_.contains(video); }
  std::size_t object_count() const override { return cached_.size(); }
  std::string_view name() const override { return "fif"; }

 protected:
  bool on_request(UserId user, VideoId video) override {
    return book_.consume(user, video);
  }
  bool lookup(VideoId video) override;
  void insert(const VideoRecord& video) override;
  VideoId victim() override;
  std::uint64_t remove(VideoId video) override;
  bool evicts_incoming() const override { return true; }

 private:
  struct Entry {
    std::uint64_t size;
    std::uint64_t last_access;
  };
  std::unordered_map<VideoId, Entry> cached_;
  LookaheadBook book_{true};
};

class LruCache final : public Cache {
 public:
  using Cache::Cache;
  bool contains(VideoId video) const override { return index_.contains(video); }
  std::size_t object_count() const override { return index_.size(); }
  std::string_view name() const override { return "lru"; }

 protected:
  bool lookup(VideoId video) override;
  void insert(const VideoRecord& video) override;
  VideoId victim() override { return order_.back().first; }
  std::uint64_t remove(VideoId video) override;

 private:
  using Order = std::list<std::pair<VideoId, std::uint64_t>>;  // front = most recent
  Order order_;
  std::unordered_map<VideoId, Order::iterator> index_;
};

class FifoCache final : public Cache {
 public:
  using Cache::Cache;
  bool contains(VideoId video) const override { return index_.contains(video); }
  std::size_t object_count() const override { return index_.size(); }
  std::string_view name() const override { return "fifo"; }

 protected:
  bool lookup(VideoId video) override { return index_.contains(video); }
  void insert(const VideoRecord& video) override;
  VideoId victim() override { return order_.back().first; }
  std::uint64_t remove(VideoId video) override;

 private:
  using Order = std::list<std::pair<VideoId, std::uint64_t>>;  // front = newest
  Order order_;
  std::unordered_map<VideoId, Order::iterator> index_;
};

/// Frequency-keyed eviction with an optional aging term L:
///   lfu:   key = hits
///   lfuda: key = hits + L
///   gdsf:  key = L + hits / size
/// L is set to the key of each evicted object (zero for lfu).
/// Ties go to the least recently used.
class FrequencyCache final : public Cache {
 public:
  enum class Variant { lfu, lfuda, gdsf };
  FrequencyCache(std::uint64_t capacity_bytes, Variant variant);

  bool contains(VideoId video) const override { return meta_.contains(video); }
  std::size_t object_count() const override { return meta_.size(); }
  std::string_view name() const override;
  double aging() const noexcept { return aging_; }
  double key_of(VideoId video) const { return meta_.at(video).key; }

 protected:
  bool lookup(VideoId video) override;
  void insert(const VideoRecord& video) override;
  VideoId victim() override { return std::get<2>(*order_.begin()); }
  std::uint64_t remove(VideoId video) override;

 private:
  struct Meta {
    std::uint64_t hits;
    std::uint64_t size;
    std::uint64_t last_access;
    double key;
  };
  double key_for(const Meta& m) const;

  Variant variant_;
  double aging_ = 0.0;
  std::unordered_map<VideoId, Meta> meta_;
  std::set<std::tuple<double, std::uint64_t, VideoId>> order_;
};

class RandomCache final : public Cache {
 public:
  RandomCache(std::uint64_t capacity_bytes, std::uint64_t seed);
  bool contains(VideoId video) const override { return slot_.contains(video); }
  std::size_t object_count() const override { return items_.size(); }
  std::string_view name() const override { return "random"; }

 protected:
  bool lookup(VideoId video) override { return slot_.contains(video); }
  void insert(const VideoRecord& video) override;
  VideoId victim() override;
  std::uint64_t remove(VideoId video) override;

 private:
  std::vector<std::pair<VideoId, std::uint64_t>> items_;
  std::unordered_map<VideoId, std::size_t> slot_;
  CounterRng rng_;
};

/// LeCaR: LRU and LFU experts weighted by regret. An eviction follows one
/// expert drawn by weight and lands in that expert's history; a later miss
/// on a history entry multiplies the other expert's weight up by
/// exp(learning_rate * discount^age).
class LecarCache final : public Cache {
 public:
  struct Options {
    double learning_rate = 0.45;
    double initial_weight = 0.5;
    /// Capacity in objects; sets the history length and discount^N = 0.005.
    std::size_t capacity_objects = 1;
    std::uint64_t seed = 123;
  };
  LecarCache(std::uint64_t capacity_bytes, const Options& options);

  bool contains(VideoId video) const override { return meta_.contains(video); }
  std::size_t object_count() const override { return meta_.size(); }
  std::string_view name() const override { return "lecar"; }
  double lru_weight() const noexcept { return w_lru_; }
  double discount() const noexcept { return discount_; }

 protected:
  bool lookup(VideoId video) override;
  void insert(const VideoRecord& video) override;
  VideoId victim() override;
  std::uint64_t remove(VideoId video) override;

 private:
  struct Meta {
    std::uint64_t freq;
    std::uint64_t size;
    std::uint64_t last_access;
  };
  struct Ghost {
    std::uint64_t freq;
    std::uint64_t evicted_at;
  };
  enum class Expert { none, lru, lfu };

  void remember(VideoId video, const Meta& meta, Expert expert);
  using History = std::deque<std::pair<VideoId, std::uint64_t>>;  // (id, evicted_at)
  void trim(History& order, std::unordered_map<VideoId, Ghost>& ghosts);

  Options options_;
  double discount_;
  double w_lru_;
  CounterRng rng_;
  std::unordered_map<VideoId, Meta> meta_;
  std::set<std::pair<std::uint64_t, VideoId>> recency_;                  // (last_access, id)
  std::set<std::tuple<std::uint64_t, std::uint64_t, VideoId>> frequency_;  // (freq, last, id)
  std::unordered_map<VideoId, Ghost> lru_ghosts_, lfu_ghosts_;
  History lru_history_, lfu_history_;
  Expert pending_ = Expert::none;
};

/// Static cache of the most popular videos. Never admits, never evicts.
class TopKCache final : public Cache {
 public:
  TopKCache(std::uint64_t capacity_bytes, std::span<const VideoRecord> popular_first);
  bool contains(VideoId video) const override { return stored_.contains(video); }
  std::size_t object_count() const override { return stored_.size(); }
  std::string_view name() const override { return "topk"; }

 protected:
  bool lookup(VideoId video) override { return stored_.contains(video); }
  void insert(const VideoRecord&) override {}
  VideoId victim() override;
  std::uint64_t remove(VideoId) override { return 0; }
  bool admits() const override { return false; }

 private:
  std::unordered_set<VideoId> stored_;
};

}  // namespace silc
