#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "silc/catalog.hpp"
#include "silc/lookahead.hpp"

namespace silc {

enum class PolicyKind { llf, fif, lru, lfu, fifo, gdsf, lfuda, random, lecar, topk };

inline constexpr PolicyKind kAllPolicies[] = {
    PolicyKind::llf,   PolicyKind::fif,    PolicyKind::lru,   PolicyKind::lfu,
    PolicyKind::fifo,  PolicyKind::gdsf,   PolicyKind::lfuda, PolicyKind::random,
    PolicyKind::lecar, PolicyKind::topk};

std::string_view policy_name(PolicyKind kind);
/// Lowercase names only; throws ConfigError("policy") otherwise.
PolicyKind parse_policy(std::string_view name);

using PolicyParams = std::map<std::string, double, std::less<>>;

struct CacheConfig {
  std::uint64_t capacity_bytes = 10 * kGiB;
  PolicyKind policy = PolicyKind::llf;
  PolicyParams params;

  void validate() const;
  double param(std::string_view name, double fallback) const;
};

struct AccessOutcome {
  bool hit = false;
  bool bypass = false;      // larger than the whole cache; served, never stored
  bool registered = true;   // the user had this video pending in its lookahead
  std::uint64_t bytes_served = 0;
  std::uint64_t bytes_fetched_midgress = 0;
  std::vector<VideoId> evicted;
};

/// Byte-accounted, capacity-bounded store. Subclasses supply the eviction
/// order; `serve` owns admission, capacity accounting and the outcome.
class Cache {
 public:
  explicit Cache(std::uint64_t capacity_bytes);
  virtual ~Cache() = default;
  Cache(const Cache&) = delete;
  Cache& operator=(const Cache&) = delete;

  AccessOutcome serve(UserId user, const VideoRecord& video);

  /// Lookahead hooks. No-ops for policies that ignore manifests.
  virtual void register_manifest(UserId, std::span<const PendingEntry>) {}
  virtual void release_user(UserId) {}
  virtual std::int64_t lookahead_frequency(VideoId) const { return 0; }
  virtual bool tracks_lookahead() const { return false; }

  virtual bool contains(VideoId video) const = 0;
  virtual std::size_t object_count() const = 0;
  virtual std::string_view name() const = 0;

  /// Throws InvariantViolation when internal bookkeeping is inconsistent.
  virtual void check_invariants() const;

  std::uint64_t capacity_bytes() const noexcept { return capacity_; }
  std::uint64_t used_bytes() const noexcept { return used_; }
  std::uint64_t tick() const noexcept { return tick_; }

 protected:
  /// Called first on every request (hit or miss).
  virtual bool on_request(UserId, VideoId) { return true; }
  /// Returns true on hit and refreshes metadata.
  virtual bool lookup(VideoId video) = 0;
  virtual void insert(const VideoRecord& video) = 0;
  /// Next object to evict. The just-inserted object is a candidate only
  /// when `evicts_incoming()`.
  virtual VideoId victim() = 0;
  /// Removes a cached object and returns its size.
  virtual std::uint64_t remove(VideoId video) = 0;

  virtual bool admits() const { return true; }
  virtual bool evicts_incoming() const { return false; }

  void account_preload(std::uint64_t bytes) { used_ += bytes; }

  std::uint64_t tick_ = 0;  // logical access clock, one step per request

 private:
  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
};

/// `popular_first` is used by topk only: candidate videos in descending
/// popularity order, preloaded greedily while they fit.
std::unique_ptr<Cache> make_cache(const CacheConfig& config,
                                  std::span<const VideoRecord> popular_first = {});

}  // namespace silc
