#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "silc/policies.hpp"

namespace silc {

LecarCache::LecarCache(std::uint64_t capacity_bytes, const Options& options)
    : Cache(capacity_bytes),
      options_(options),
      discount_(std::pow(0.005, 1.0 / static_cast<double>(std::max<std::size_t>(
                                          1, options.capacity_objects)))),
      w_lru_(options.initial_weight),
      rng_(CounterRng::stream(options.seed, 0x1ECA4)) {
  options_.capacity_objects = std::max<std::size_t>(1, options_.capacity_objects);
}

bool LecarCache::lookup(VideoId video) {
  auto it = meta_.find(video);
  if (it == meta_.end()) return false;
  auto& m = it->second;
  recency_.erase({m.last_access, video});
  frequency_.erase({m.freq, m.last_access, video});
  ++m.freq;
  m.last_access = tick_;
  recency_.emplace(m.last_access, video);
  frequency_.emplace(m.freq, m.last_access, video);
  return true;
}

void LecarCache::insert(const VideoRecord& video) {
  std::uint64_t freq = 1;
  auto regret = [&](std::unordered_map<VideoId, Ghost>& ghosts, bool lru_erred) {
    auto g = ghosts.find(video.video_id);
    if (g == ghosts.end()) return false;
    freq = g->second.freq + 1;
    const double reward =
        std::pow(discount_, static_cast<double>(tick_ - g->second.evicted_at));
    ghosts.erase(g);
    // The expert that evicted this object loses weight.
    double w_lru = w_lru_;
    double w_lfu = 1.0 - w_lru_;
    (lru_erred ? w_lru : w_lfu) *= std::exp(-options_.learning_rate * reward);
    w_lru_ = std::clamp(w_lru / (w_lru + w_lfu), 0.01, 0.99);
    return true;
  };
  if (!regret(lru_ghosts_, true)) regret(lfu_ghosts_, false);

  const Meta m{freq, video.size_bytes, tick_};
  meta_.emplace(video.video_id, m);
  recency_.emplace(m.last_access, video.video_id);
  frequency_.emplace(m.freq, m.last_access, video.video_id);
}

VideoId LecarCache::victim() {
  if (meta_.empty()) throw std::logic_error("victim on an empty cache");
  const VideoId by_recency = recency_.begin()->second;
  const VideoId by_frequency = std::get<2>(*frequency_.begin());
  if (by_recency == by_frequency) {
    pending_ = Expert::none;
    return by_recency;
  }
  if (rng_.uniform() < w_lru_) {
    pending_ = Expert::lru;
    return by_recency;
  }
  pending_ = Expert::lfu;
  return by_frequency;
}

void LecarCache::trim(History& order, std::unordered_map<VideoId, Ghost>& ghosts) {
  while (ghosts.size() > options_.capacity_objects && !order.empty()) {
    const auto [id, at] = order.front();
    order.pop_front();
    auto g = ghosts.find(id);
    if (g != ghosts.end() && g->second.evicted_at == at) ghosts.erase(g);
  }
  // Drop entries that were readmitted since they were recorded.
  while (!order.empty()) {
    auto g = ghosts.find(order.front().first);
    if (g != ghosts.end() && g->second.evicted_at == order.front().second) break;
    order.pop_front();
  }
}

void LecarCache::remember(VideoId video, const Meta& meta, Expert expert) {
  if (expert == Expert::none) return;
  auto& ghosts = expert == Expert::lru ? lru_ghosts_ : lfu_ghosts_;
  auto& order = expert == Expert::lru ? lru_history_ : lfu_history_;
  ghosts[video] = {meta.freq, tick_};
  order.emplace_back(video, tick_);
  trim(order, ghosts);
}

std::uint64_t LecarCache::remove(VideoId video) {
  auto it = meta_.find(video);
  const Meta m = it->second;
  recency_.erase({m.last_access, video});
  frequency_.erase({m.freq, m.last_access, video});
  meta_.erase(it);
  remember(video, m, pending_);
  pending_ = Expert::none;
  return m.size;
}

}  // namespace silc
