#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "silc/cache.hpp"

namespace silc {

struct BenchConfig {
  std::size_t requests = 1'000'000;
  std::size_t cache_objects = 10'000;
  std::size_t catalog_factor = 10;  // catalog holds cache_objects * factor videos
  std::size_t active_users = 500;
  std::size_t manifest_length = kManifestLength;
  std::size_t manifests_per_user = 5;
  double alpha = 1.62;
  std::uint64_t seed = 1;
};

struct LatencyStats {
  double median_ns = 0;
  double p90_ns = 0;
  double p99_ns = 0;
  double mean_ns = 0;
  double hit_rate = 0;
  std::size_t requests = 0;
};

/// Per-request service latency on a synthetic unit-size stream. Manifest
/// registration and user release are timed as part of the request that
/// triggers them. The stream is identical for every policy.
LatencyStats bench_policy(PolicyKind policy, const BenchConfig& config);

struct ScalingFit {
  std::vector<std::pair<std::size_t, double>> points;  // (cache objects, median ns)
  double exponent = 0;  // least-squares slope of log median vs log objects
};

ScalingFit bench_scaling(PolicyKind policy, std::vector<std::size_t> cache_objects,
                         BenchConfig config);

}  // namespace silc
