#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "silc/cache.hpp"
#include "silc/catalog.hpp"
#include "silc/reorder.hpp"

namespace silc {

/// Server owning a video: first 8 bytes of sha256(decimal id), big-endian,
/// modulo n_servers.
std::uint32_t shard(VideoId video, std::uint32_t n_servers);

struct ClusterConfig {
  std::uint32_t n_servers = 10;
  std::uint64_t per_server_capacity_bytes = 10 * kGiB;
  std::size_t initial_clients = 10;
  std::size_t max_clients = 500;
  std::int64_t client_add_interval_ms = 10;
  std::size_t refill_threshold = 10;
  std::size_t manifests_per_user = 5;  // 0 = every manifest the user has
  bool reorder_enabled = false;
  double duration_scale = 1.0;
  std::uint64_t seed = 1;
  /// Run every server's check_invariants() after this many video requests
  /// (0 = only once, at the end of the run).
  std::size_t check_every = 0;

  void validate(std::size_t manifest_len) const;
};

enum class EventKind : std::uint8_t { manifest, video };

struct RequestEvent {
  std::int64_t tick_ms = 0;
  UserId user = 0;
  EventKind kind = EventKind::video;
  VideoId video = 0;          // video events only
  std::uint32_t server = 0;   // video events only
  bool hit = false;
  bool bypass = false;
  std::uint64_t bytes = 0;
  std::uint32_t sequence_no = 0;  // manifest events only

  bool operator==(const RequestEvent&) const = default;
};

struct UserWorkload {
  UserId user_id = 0;
  std::vector<ManifestFile> manifests;
};

std::vector<UserWorkload> build_workload(std::span<const EmulatedUser> users,
                                         std::size_t manifest_len = kManifestLength);

struct SimulationResult {
  std::vector<RequestEvent> trace;  // all servers, in event order
  DisplacementHistogram displacement;
  std::uint64_t reordered_manifests = 0;
  std::uint64_t unregistered_requests = 0;
  std::size_t peak_clients = 0;
  std::vector<std::uint64_t> server_used_bytes;
};

SimulationResult run_simulation(const Catalog& catalog,
                                std::span<const UserWorkload> users,
                                const ClusterConfig& cluster, const CacheConfig& cache);

/// Byte miss rate of an infinite cache: distinct requested bytes over all
/// requested bytes.
double compulsory_floor(const Catalog& catalog, std::span<const UserWorkload> users);
double compulsory_floor(const Catalog& catalog, std::span<const EmulatedUser> users);

/// Line-delimited JSON:
/// {"tick":..,"user":..,"kind":"video"|"manifest","video":..,"server":..,
///  "hit":..,"bytes":..}; manifest lines carry "seq" and null video/server.
void write_trace(std::ostream& out, std::span<const RequestEvent> trace);
std::vector<RequestEvent> read_trace(std::istream& in);

}  // namespace silc
