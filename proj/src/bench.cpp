#include "silc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <optional>

#include "silc/error.hpp"

namespace silc {

namespace {

struct Op {
  UserId user;
  std::uint32_t video_index;
  std::int32_t manifest = -1;      // index into manifests, registered first
  std::optional<UserId> released;  // user released before this request
};

struct Stream {
  Catalog catalog;
  std::vector<std::vector<PendingEntry>> manifests;
  std::vector<Op> ops;
};

Stream make_stream(const BenchConfig& cfg) {
  if (cfg.requests == 0 || cfg.cache_objects == 0 || cfg.active_users == 0 ||
      cfg.manifest_length == 0 || cfg.manifests_per_user == 0 || cfg.catalog_factor == 0)
    throw ConfigError("bench", "sizes must be positive");
  Stream s;
  const std::size_t n_videos = cfg.cache_objects * cfg.catalog_factor;
  auto rng = CounterRng::stream(cfg.seed, 0xBE7C);
  std::vector<VideoRecord> records(n_videos);
  for (std::size_t i = 0; i < n_videos; ++i)
    records[i] = {i + 1, 1, 1000, std::pow(rng.uniform_pos(), -1.0 / cfg.alpha)};
  s.catalog = Catalog(std::move(records));
  const PopularityTable table(s.catalog);

  struct Active {
    UserId id;
    std::deque<std::uint32_t> queue;
    std::size_t manifests = 0;
    std::int64_t position = 0;
  };
  std::vector<Active> active(cfg.active_users);
  UserId next_id = 0;
  for (auto& a : active) a.id = next_id++;

  s.ops.reserve(cfg.requests);
  for (std::size_t k = 0; k < cfg.requests; ++k) {
    Active& a = active[k % active.size()];
    Op op{a.id, 0, -1, std::nullopt};
    if (a.queue.empty()) {
      if (a.manifests == cfg.manifests_per_user) {
        op.released = a.id;
        a = Active{next_id++, {}, 0, 0};
        op.user = a.id;
      }
      std::vector<PendingEntry> m;
      for (std::size_t i = 0; i < cfg.manifest_length; ++i) {
        const auto idx = static_cast<std::uint32_t>(table.draw(rng));
        a.queue.push_back(idx);
        m.push_back({s.catalog[idx].video_id, a.position++});
      }
      ++a.manifests;
      op.manifest = static_cast<std::int32_t>(s.manifests.size());
      s.manifests.push_back(std::move(m));
    }
    op.video_index = a.queue.front();
    a.queue.pop_front();
    s.ops.push_back(op);
  }
  return s;
}

double quantile(const std::vector<double>& sorted, double q) {
  const auto i = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
  return sorted[i];
}

LatencyStats measure(PolicyKind policy, const BenchConfig& cfg, const Stream& s) {
  CacheConfig cc;
  cc.capacity_bytes = cfg.cache_objects;
  cc.policy = policy;
  auto cache = make_cache(cc);

  using Clock = std::chrono::steady_clock;
  std::vector<double> ns(s.ops.size());
  std::size_t hits = 0;
  for (std::size_t k = 0; k < s.ops.size(); ++k) {
    const Op& op = s.ops[k];
    const VideoRecord& rec = s.catalog[op.video_index];
    const auto t0 = Clock::now();
    if (op.released) cache->release_user(*op.released);
    if (op.manifest >= 0) cache->register_manifest(op.user, s.manifests[op.manifest]);
    const bool hit = cache->serve(op.user, rec).hit;
    const auto t1 = Clock::now();
    hits += hit;
    ns[k] = static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  cache->check_invariants();

  LatencyStats st;
  st.requests = ns.size();
  st.hit_rate = static_cast<double>(hits) / static_cast<double>(ns.size());
  for (double v : ns) st.mean_ns += v;
  st.mean_ns /= static_cast<double>(ns.size());
  std::sort(ns.begin(), ns.end());
  st.median_ns = quantile(ns, 0.5);
  st.p90_ns = quantile(ns, 0.9);
  st.p99_ns = quantile(ns, 0.99);
  return st;
}

}  // namespace

LatencyStats bench_policy(PolicyKind policy, const BenchConfig& config) {
  return measure(policy, config, make_stream(config));
}

ScalingFit bench_scaling(PolicyKind policy, std::vector<std::size_t> cache_objects,
                         BenchConfig config) {
  ScalingFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto n : cache_objects) {
    config.cache_objects = n;
    const double median = bench_policy(policy, config).median_ns;
    fit.points.emplace_back(n, median);
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(std::max(median, 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const auto m = static_cast<double>(cache_objects.size());
  const double denom = m * sxx - sx * sx;
  fit.exponent = denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
  return fit;
}

}  // namespace silc
