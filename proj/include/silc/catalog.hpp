#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "silc/rng.hpp"

namespace silc {

using VideoId = std::uint64_t;
using UserId = std::uint32_t;
using ParticipantId = std::uint32_t;

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * kKiB;
inline constexpr std::uint64_t kGiB = 1024 * kMiB;
inline constexpr std::int64_t kSecondsPerDay = 86400;

struct VideoRecord {
  VideoId video_id = 0;
  std::uint64_t size_bytes = 0;
  std::uint32_t duration_ms = 0;
  double play_count = 1.0;  // C_v, Pareto with x_m = 1

  bool operator==(const VideoRecord&) const = default;
};

struct QuantileAnchor {
  double fraction;
  double value;
};

/// Monotone curve through (0, min), anchors..., (1, max), linear in log(value).
struct QuantileCurve {
  double min_value = 1;
  double max_value = 1;
  std::vector<QuantileAnchor> anchors;

  /// Value at cumulative fraction u in [0, 1].
  double at(double u) const;
  void validate(const std::string& field) const;
};

QuantileCurve default_size_curve();
QuantileCurve default_duration_curve();

struct CatalogConfig {
  std::size_t n_videos = 2'650'000;
  double alpha = 1.62;
  std::uint64_t seed = 1;
  QuantileCurve sizes = default_size_curve();
  QuantileCurve durations = default_duration_curve();

  void validate() const;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<VideoRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const VideoRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const VideoRecord> records() const noexcept { return records_; }

  std::optional<std::size_t> index_of(VideoId id) const;
  /// Throws std::out_of_range for unknown ids.
  const VideoRecord& at(VideoId id) const;
  double total_play_count() const noexcept { return total_play_count_; }

 private:
  std::vector<VideoRecord> records_;
  std::unordered_map<VideoId, std::uint32_t> index_;
  double total_play_count_ = 0;
};

/// Pareto density with shape alpha and scale x_m.
double pareto_pdf(double x, double alpha, double x_m = 1.0);

Catalog generate_catalog(const CatalogConfig& config);

/// Popularity-proportional sampler over a catalog (P(v) = C_v / sum C).
class PopularityTable {
 public:
  explicit PopularityTable(const Catalog& catalog);
  std::size_t draw(CounterRng& rng) const;

 private:
  std::vector<double> cumulative_;
};

struct ViewEvent {
  std::int64_t timestamp_s;
  VideoId video_id;

  bool operator==(const ViewEvent&) const = default;
};

struct ParticipantHistory {
  ParticipantId participant_id = 0;
  std::vector<ViewEvent> events;  // time ordered

  bool operator==(const ParticipantHistory&) const = default;
};

inline constexpr double kDailyViews = 332.0;

std::vector<ParticipantHistory> generate_participants(
    const Catalog& catalog, std::size_t n_participants, int days,
    std::uint64_t seed, double daily_views = kDailyViews);

/// Selection probabilities over `pool`:
/// beta * C_v / sum_pool C + (1 - beta) / |pool|.
std::vector<double> selection_weights(const Catalog& catalog,
                                      std::span<const VideoId> pool,
                                      double beta);

VideoId sample_video(const Catalog& catalog, std::span<const VideoId> pool,
                     double beta, CounterRng& rng);

struct EmulatedUser {
  UserId user_id = 0;
  std::vector<ParticipantId> personality;
  std::int64_t window_start_s = 0;
  std::int64_t window_end_s = 0;
  double beta = 1.0;
  std::vector<VideoId> video_sequence;

  bool operator==(const EmulatedUser&) const = default;
};

struct UserGenConfig {
  std::size_t n_users = 10'000;
  std::size_t videos_per_user = 150;
  int window_days = 4;
  std::size_t batch_size = 100;
  int batch_shift_days = 1;
  int k_min = 5;
  int k_max = 100;
  double beta = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Users are generated from independent (seed, user_id) substreams, so the
/// result does not depend on `threads`. Personality and window depend only
/// on (seed, user_id), not on beta.
std::vector<EmulatedUser> generate_users(
    const Catalog& catalog, std::span<const ParticipantHistory> participants,
    const UserGenConfig& config);

struct ManifestFile {
  UserId user_id = 0;
  std::uint32_t sequence_no = 0;
  std::vector<VideoId> entries;

  bool operator==(const ManifestFile&) const = default;
};

inline constexpr std::size_t kManifestLength = 30;

std::vector<ManifestFile> build_manifests(const EmulatedUser& user,
                                          std::size_t manifest_len =
                                              kManifestLength);

}  // namespace silc
