#include "silc/lookahead.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace silc {

void LookaheadBook::add(UserId user, const PendingEntry& entry) {
  users_[user].pending.push_back(entry);
  ++counts_[entry.video];
  ++total_;
  if (track_positions_) occurrences_[entry.video].push_back({user, entry.position});
}

void LookaheadBook::drop(UserId user, const PendingEntry& e) {
  auto c = counts_.find(e.video);
  if (--c->second == 0) counts_.erase(c);
  --total_;
  if (!track_positions_) return;
  auto o = occurrences_.find(e.video);
  auto& list = o->second;
  auto hit = std::find_if(list.begin(), list.end(), [&](const Occurrence& x) {
    return x.user == user && x.position == e.position;
  });
  *hit = list.back();
  list.pop_back();
  if (list.empty()) occurrences_.erase(o);
}

bool LookaheadBook::consume(UserId user, VideoId video) {
  auto it = users_.find(user);
  if (it == users_.end()) return false;
  auto& q = it->second.pending;
  auto e = std::find_if(q.begin(), q.end(),
                        [&](const PendingEntry& x) { return x.video == video; });
  if (e == q.end()) return false;
  const PendingEntry entry = *e;
  q.erase(e);
  it->second.progress = std::max(it->second.progress, entry.position + 1);
  drop(user, entry);
  return true;
}

std::int64_t LookaheadBook::count(VideoId video) const {
  auto it = counts_.find(video);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t LookaheadBook::pending_for(UserId user) const {
  auto it = users_.find(user);
  return it == users_.end() ? 0 : it->second.pending.size();
}

std::optional<std::int64_t> LookaheadBook::next_use(VideoId video) const {
  if (!track_positions_) throw std::logic_error("next_use needs position tracking");
  auto o = occurrences_.find(video);
  if (o == occurrences_.end()) return std::nullopt;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& x : o->second)
    best = std::min(best, x.position - users_.at(x.user).progress);
  return std::max<std::int64_t>(best, 0);
}

}  // namespace silc
