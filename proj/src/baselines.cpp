#include <stdexcept>

#include "silc/policies.hpp"

namespace silc {

// LRU

bool LruCache::lookup(VideoId video) {
  auto it = index_.find(video);
  if (it == index_.end()) return false;
  order_.splice(order_.begin(), order_, it->second);
  return true;
}

void LruCache::insert(const VideoRecord& video) {
  order_.emplace_front(video.video_id, video.size_bytes);
  index_[video.video_id] = order_.begin();
}

std::uint64_t LruCache::remove(VideoId video) {
  auto it = index_.find(video);
  const auto size = it->second->second;
  order_.erase(it->second);
  index_.erase(it);
  return size;
}

// FIFO

void FifoCache::insert(const VideoRecord& video) {
  order_.emplace_front(video.video_id, video.size_bytes);
  index_[video.video_id] = order_.begin();
}

std::uint64_t FifoCache::remove(VideoId video) {
  auto it = index_.find(video);
  const auto size = it->second->second;
  order_.erase(it->second);
  index_.erase(it);
  return size;
}

// LFU / LFUDA / GDSF

FrequencyCache::FrequencyCache(std::uint64_t capacity_bytes, Variant variant)
    : Cache(capacity_bytes), variant_(variant) {}

std::string_view FrequencyCache::name() const {
  switch (variant_) {
    case Variant::lfu: return "lfu";
    case Variant::lfuda: return "lfuda";
    case Variant::gdsf: return "gdsf";
  }
  return "?";
}

double FrequencyCache::key_for(const Meta& m) const {
  const auto hits = static_cast<double>(m.hits);
  switch (variant_) {
    case Variant::lfu: return hits;
    case Variant::lfuda: return hits + aging_;
    case Variant::gdsf: return aging_ + hits / static_cast<double>(m.size);
  }
  return hits;
}

bool FrequencyCache::lookup(VideoId video) {
  auto it = meta_.find(video);
  if (it == meta_.end()) return false;
  auto& m = it->second;
  order_.erase({m.key, m.last_access, video});
  ++m.hits;
  m.last_access = tick_;
  m.key = key_for(m);
  order_.emplace(m.key, m.last_access, video);
  return true;
}

void FrequencyCache::insert(const VideoRecord& video) {
  Meta m{1, video.size_bytes, tick_, 0.0};
  m.key = key_for(m);
  meta_.emplace(video.video_id, m);
  order_.emplace(m.key, m.last_access, video.video_id);
}

std::uint64_t FrequencyCache::remove(VideoId video) {
  auto it = meta_.find(video);
  const Meta m = it->second;
  order_.erase({m.key, m.last_access, video});
  meta_.erase(it);
  if (variant_ != Variant::lfu) aging_ = m.key;
  return m.size;
}

// Random

RandomCache::RandomCache(std::uint64_t capacity_bytes, std::uint64_t seed)
    : Cache(capacity_bytes), rng_(CounterRng::stream(seed, 0x7A4D)) {}

void RandomCache::insert(const VideoRecord& video) {
  slot_[video.video_id] = items_.size();
  items_.emplace_back(video.video_id, video.size_bytes);
}

VideoId RandomCache::victim() {
  if (items_.empty()) throw std::logic_error("victim on an empty cache");
  return items_[rng_.below(items_.size())].first;
}

std::uint64_t RandomCache::remove(VideoId video) {
  auto it = slot_.find(video);
  const std::size_t i = it->second;
  const auto size = items_[i].second;
  items_[i] = items_.back();
  slot_[items_[i].first] = i;
  items_.pop_back();
  slot_.erase(video);
  return size;
}

// Top-K

TopKCache::TopKCache(std::uint64_t capacity_bytes, std::span<const VideoRecord> popular_first)
    : Cache(capacity_bytes) {
  std::uint64_t used = 0;
  for (const auto& v : popular_first) {
    if (used + v.size_bytes > capacity_bytes || stored_.contains(v.video_id)) continue;
    stored_.insert(v.video_id);
    used += v.size_bytes;
  }
  account_preload(used);
}

VideoId TopKCache::victim() { throw std::logic_error("topk never evicts"); }

}  // namespace silc
