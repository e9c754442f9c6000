#include "silc/llf.hpp"

#include <stdexcept>
#include <string>

#include "silc/error.hpp"

namespace silc {

LlfCache::LlfCache(std::uint64_t capacity_bytes) : Cache(capacity_bytes) {}

void LlfCache::push(VideoId video, const Slot& slot) {
  heap_.emplace(slot.freq, slot.last_access, video);
}

void LlfCache::maybe_compact() {
  if (heap_.size() <= 4 * in_cache_.size() + 64) return;
  std::vector<Snapshot> fresh;
  fresh.reserve(in_cache_.size());
  for (const auto& [id, s] : in_cache_) fresh.emplace_back(s.freq, s.last_access, id);
  heap_ = decltype(heap_)(std::greater<>{}, std::move(fresh));
}

void LlfCache::adjust(VideoId video, std::int64_t delta) {
  if (auto it = in_cache_.find(video); it != in_cache_.end()) {
    it->second.freq += delta;
    push(video, it->second);
    return;
  }
  auto [it, fresh] = out_of_cache_.try_emplace(video, 0);
  it->second += delta;
  if (it->second == 0) out_of_cache_.erase(it);
}

void LlfCache::register_manifest(UserId user, std::span<const PendingEntry> entries) {
  for (const auto& e : entries) {
    book_.add(user, e);
    adjust(e.video, +1);
  }
  maybe_compact();
}

void LlfCache::release_user(UserId user) {
  book_.release(user, [&](VideoId v) { adjust(v, -1); });
  maybe_compact();
}

std::int64_t LlfCache::lookahead_frequency(VideoId video) const {
  if (auto it = in_cache_.find(video); it != in_cache_.end()) return it->second.freq;
  auto it = out_of_cache_.find(video);
  return it == out_of_cache_.end() ? 0 : it->second;
}

bool LlfCache::on_request(UserId user, VideoId video) {
  // Unregistered accesses leave f untouched.
  if (!book_.consume(user, video)) return false;
  adjust(video, -1);
  return true;
}

bool LlfCache::lookup(VideoId video) {
  auto it = in_cache_.find(video);
  if (it == in_cache_.end()) return false;
  it->second.last_access = tick_;
  push(video, it->second);
  maybe_compact();
  return true;
}

void LlfCache::insert(const VideoRecord& video) {
  std::int64_t freq = 0;
  if (auto it = out_of_cache_.find(video.video_id); it != out_of_cache_.end()) {
    freq = it->second;
    out_of_cache_.erase(it);
  }
  const Slot slot{freq, tick_, video.size_bytes};
  in_cache_.emplace(video.video_id, slot);
  push(video.video_id, slot);
}

VideoId LlfCache::evict_candidate() const {
  while (!heap_.empty()) {
    const auto& [freq, last, id] = heap_.top();
    auto it = in_cache_.find(id);
    if (it != in_cache_.end() && it->second.freq == freq && it->second.last_access == last)
      return id;
    heap_.pop();
  }
  throw std::logic_error("evict_candidate on an empty cache");
}

std::uint64_t LlfCache::remove(VideoId video) {
  auto it = in_cache_.find(video);
  const Slot slot = it->second;
  in_cache_.erase(it);
  if (slot.freq != 0) out_of_cache_[video] = slot.freq;
  return slot.size;
}

std::int64_t LlfCache::total_frequency() const {
  std::int64_t total = 0;
  for (const auto& [id, s] : in_cache_) total += s.freq;
  for (const auto& [id, f] : out_of_cache_) total += f;
  return total;
}

void LlfCache::check_invariants() const {
  Cache::check_invariants();
  std::uint64_t bytes = 0;
  for (const auto& [id, s] : in_cache_) {
    if (s.freq < 0) throw InvariantViolation("llf: negative frequency");
    if (out_of_cache_.contains(id))
      throw InvariantViolation("llf: cached video present in out-of-cache map");
    if (s.freq != book_.count(id))
      throw InvariantViolation("llf: frequency of " + std::to_string(id) +
                               " disagrees with pending entries");
    bytes += s.size;
  }
  for (const auto& [id, f] : out_of_cache_)
    if (f <= 0 || f != book_.count(id))
      throw InvariantViolation("llf: out-of-cache frequency disagrees with pending entries");
  if (bytes != used_bytes()) throw InvariantViolation("llf: byte accounting drift");
  if (total_frequency() != book_.total_pending())
    throw InvariantViolation("llf: frequency sum differs from pending entry count");
}

}  // namespace silc
