#include <limits>
#include <stdexcept>

#include "silc/policies.hpp"

namespace silc {

FifCache::FifCache(std::uint64_t capacity_bytes) : Cache(capacity_bytes) {}

void FifCache::register_manifest(UserId user, std::span<const PendingEntry> entries) {
  for (const auto& e : entries) book_.add(user, e);
}

void FifCache::release_user(UserId user) {
  book_.release(user, [](VideoId) {});
}

bool FifCache::lookup(VideoId video) {
  auto it = cached_.find(video);
  if (it == cached_.end()) return false;
  it->second.last_access = tick_;
  return true;
}

void FifCache::insert(const VideoRecord& video) {
  cached_.emplace(video.video_id, Entry{video.size_bytes, tick_});
}

VideoId FifCache::victim() {
  if (cached_.empty()) throw std::logic_error("victim on an empty cache");
  constexpr auto kNever = std::numeric_limits<std::int64_t>::max();
  VideoId best = 0;
  std::int64_t best_distance = -1;
  std::uint64_t best_access = 0;
  for (const auto& [id, e] : cached_) {
    const std::int64_t d = book_.next_use(id).value_or(kNever);
    if (d > best_distance || (d == best_distance && e.last_access < best_access)) {
      best = id;
      best_distance = d;
      best_access = e.last_access;
    }
  }
  return best;
}

std::uint64_t FifCache::remove(VideoId video) {
  auto it = cached_.find(video);
  const auto size = it->second.size;
  cached_.erase(it);
  return size;
}

}  // namespace silc
