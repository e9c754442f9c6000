#include "silc/cache.hpp"

#include <algorithm>
#include <cmath>

#include "silc/error.hpp"
#include "silc/llf.hpp"
#include "silc/policies.hpp"

namespace silc {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::llf: return "llf";
    case PolicyKind::fif: return "fif";
    case PolicyKind::lru: return "lru";
    case PolicyKind::lfu: return "lfu";
    case PolicyKind::fifo: return "fifo";
    case PolicyKind::gdsf: return "gdsf";
    case PolicyKind::lfuda: return "lfuda";
    case PolicyKind::random: return "random";
    case PolicyKind::lecar: return "lecar";
    case PolicyKind::topk: return "topk";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  for (auto k : kAllPolicies)
    if (policy_name(k) == name) return k;
  throw ConfigError("policy", "unknown policy '" + std::string(name) + "'");
}

void CacheConfig::validate() const {
  if (capacity_bytes == 0) throw ConfigError("capacity_bytes", "must be positive");
}

double CacheConfig::param(std::string_view name, double fallback) const {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

Cache::Cache(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {
  if (capacity_bytes == 0) throw ConfigError("capacity_bytes", "must be positive");
}

AccessOutcome Cache::serve(UserId user, const VideoRecord& video) {
  ++tick_;
  AccessOutcome out;
  out.bytes_served = video.size_bytes;
  out.registered = on_request(user, video.video_id);
  if (lookup(video.video_id)) {
    out.hit = true;
    return out;
  }
  out.bytes_fetched_midgress = video.size_bytes;
  if (!admits()) return out;
  if (video.size_bytes > capacity_) {
    out.bypass = true;
    return out;
  }
  auto evict_one = [&] {
    const VideoId v = victim();
    used_ -= remove(v);
    out.evicted.push_back(v);
  };
  if (evicts_incoming()) {
    insert(video);
    used_ += video.size_bytes;
    while (used_ > capacity_) evict_one();
  } else {
    while (used_ + video.size_bytes > capacity_) evict_one();
    insert(video);
    used_ += video.size_bytes;
  }
  return out;
}

void Cache::check_invariants() const {
  if (used_ > capacity_)
    throw InvariantViolation(std::string(name()) + ": used bytes exceed capacity");
}

std::unique_ptr<Cache> make_cache(const CacheConfig& config,
                                  std::span<const VideoRecord> popular_first) {
  config.validate();
  const auto cap = config.capacity_bytes;
  switch (config.policy) {
    case PolicyKind::llf: return std::make_unique<LlfCache>(cap);
    case PolicyKind::fif: return std::make_unique<FifCache>(cap);
    case PolicyKind::lru: return std::make_unique<LruCache>(cap);
    case PolicyKind::fifo: return std::make_unique<FifoCache>(cap);
    case PolicyKind::lfu:
      return std::make_unique<FrequencyCache>(cap, FrequencyCache::Variant::lfu);
    case PolicyKind::lfuda:
      return std::make_unique<FrequencyCache>(cap, FrequencyCache::Variant::lfuda);
    case PolicyKind::gdsf:
      return std::make_unique<FrequencyCache>(cap, FrequencyCache::Variant::gdsf);
    case PolicyKind::random:
      return std::make_unique<RandomCache>(
          cap, static_cast<std::uint64_t>(config.param("seed", 7)));
    case PolicyKind::lecar: {
      LecarCache::Options o;
      o.learning_rate = config.param("learning_rate", o.learning_rate);
      o.initial_weight = config.param("initial_weight", o.initial_weight);
      // Without an explicit object capacity, assume median-sized (~3.5 MiB) videos.
      const double mean_bytes = config.param("mean_object_bytes", 3.5 * kMiB);
      o.capacity_objects = static_cast<std::size_t>(std::max(
          1.0, config.param("capacity_objects", std::floor(static_cast<double>(cap) / mean_bytes))));
      o.seed = static_cast<std::uint64_t>(config.param("seed", static_cast<double>(o.seed)));
      return std::make_unique<LecarCache>(cap, o);
    }
    case PolicyKind::topk: return std::make_unique<TopKCache>(cap, popular_first);
  }
  throw ConfigError("policy", "unhandled policy");
}

}  // namespace silc
