#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "silc/catalog.hpp"

namespace silc {

/// One registered manifest entry. `position` is the entry's index in the
/// owning user's request stream, used to measure next-use distance.
struct PendingEntry {
  VideoId video;
  std::int64_t position;
};

/// Per-user queues of registered-but-unserved manifest entries, plus
/// per-video pending counts. With `track_positions`, also indexes each
/// pending occurrence so next-use distance can be queried.
class LookaheadBook {
 public:
  explicit LookaheadBook(bool track_positions = false)
      : track_positions_(track_positions) {}

  void add(UserId user, const PendingEntry& entry);

  /// Removes the user's first pending occurrence of `video`. Returns false
  /// when the user has none registered.
  bool consume(UserId user, VideoId video);

  /// Drops every pending entry of `user`, calling fn(video) once per entry.
  template <class Fn>
  void release(UserId user, Fn&& fn) {
    auto it = users_.find(user);
    if (it == users_.end()) return;
    for (const auto& e : it->second.pending) {
      drop(user, e);
      fn(e.video);
    }
    users_.erase(it);
  }

  std::int64_t count(VideoId video) const;
  std::int64_t total_pending() const noexcept { return total_; }
  std::size_t pending_for(UserId user) const;
  bool has_user(UserId user) const { return users_.contains(user); }

  /// Smallest number of stream entries any user still has to consume
  /// before reaching `video`; nullopt when no user has it pending.
  /// Requires track_positions.
  std::optional<std::int64_t> next_use(VideoId video) const;

 private:
  struct UserQueue {
    std::deque<PendingEntry> pending;
    std::int64_t progress = 0;  // position after the last consumed entry
  };
  struct Occurrence {
    UserId user;
    std::int64_t position;
  };

  void drop(UserId user, const PendingEntry& e);

  bool track_positions_;
  std::unordered_map<UserId, UserQueue> users_;
  std::unordered_map<VideoId, std::int64_t> counts_;
  std::unordered_map<VideoId, std::vector<Occurrence>> occurrences_;
  std::int64_t total_ = 0;
};

}  // namespace silc
