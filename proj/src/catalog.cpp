#include "silc/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "silc/error.hpp"

namespace silc {

double QuantileCurve::at(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  double f0 = 0.0;
  double v0 = min_value;
  auto step = [&](double f1, double v1) -> std::optional<double> {
    if (u > f1) {
      f0 = f1;
      v0 = v1;
      return std::nullopt;
    }
    const double t = f1 > f0 ? (u - f0) / (f1 - f0) : 0.0;
    return std::exp(std::log(v0) + t * (std::log(v1) - std::log(v0)));
  };
  for (const auto& a : anchors)
    if (auto v = step(a.fraction, a.value)) return *v;
  return *step(1.0, max_value);
}

void QuantileCurve::validate(const std::string& field) const {
  if (!(min_value > 0)) throw ConfigError(field, "minimum must be positive");
  double prev_f = 0.0;
  double prev_v = min_value;
  for (const auto& a : anchors) {
    if (!(a.fraction > prev_f && a.fraction < 1.0))
      throw ConfigError(field,
                        "anchor fractions must be strictly increasing in (0,1)");
    if (!(a.value > prev_v))
      throw ConfigError(field, "anchor values must be strictly increasing");
    prev_f = a.fraction;
    prev_v = a.value;
  }
  if (!(max_value > prev_v))
    throw ConfigError(field, "maximum must exceed every anchor value");
}

QuantileCurve default_size_curve() {
  return {11.0 * kKiB,
          1000.0 * kMiB,
          {{0.12, 1.0 * kMiB}, {0.43, 3.0 * kMiB}, {0.78, 10.0 * kMiB}}};
}

QuantileCurve default_duration_curve() {
  return {3'000.0,
          600'000.0,
          {{0.25, 11'000.0}, {0.50, 23'000.0}, {0.75, 60'000.0},
           {0.92, 120'000.0}}};
}

void CatalogConfig::validate() const {
  if (n_videos == 0) throw ConfigError("n_videos", "must be positive");
  if (n_videos > std::numeric_limits<std::uint32_t>::max())
    throw ConfigError("n_videos", "too large");
  if (!(alpha > 0)) throw ConfigError("alpha", "must be positive");
  sizes.validate("size_quantiles");
  durations.validate("duration_quantiles");
}

Catalog::Catalog(std::vector<VideoRecord> records) : records_(std::move(records)) {
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.size_bytes == 0 || r.duration_ms == 0 || !(r.play_count >= 1.0))
      throw std::invalid_argument("malformed video record " +
                                  std::to_string(r.video_id));
    if (!index_.emplace(r.video_id, static_cast<std::uint32_t>(i)).second)
      throw std::invalid_argument("duplicate video id " +
                                  std::to_string(r.video_id));
    total_play_count_ += r.play_count;
  }
}

std::optional<std::size_t> Catalog::index_of(VideoId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const VideoRecord& Catalog::at(VideoId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::out_of_range("unknown video id " + std::to_string(id));
  return records_[it->second];
}

double pareto_pdf(double x, double alpha, double x_m) {
  if (x < x_m) return 0.0;
  return alpha * std::pow(x_m, alpha) / std::pow(x, alpha + 1.0);
}

Catalog generate_catalog(const CatalogConfig& config) {
  config.validate();
  auto rng = CounterRng::stream(config.seed, 0xCA7A10C);
  const std::uint64_t id_key = mix64(config.seed ^ 0x51DE0F00DULL);
  std::vector<VideoRecord> records(config.n_videos);
  for (std::size_t i = 0; i < config.n_videos; ++i) {
    auto& r = records[i];
    // mix64 is a bijection, so ids are unique for a fixed seed.
    r.video_id = mix64(id_key + i);
    r.play_count = std::pow(rng.uniform_pos(), -1.0 / config.alpha);
    // One quantile drives both size and duration: longer videos are larger.
    const double u = rng.uniform();
    r.size_bytes = static_cast<std::uint64_t>(std::clamp(
        std::llround(config.sizes.at(u)),
        static_cast<long long>(std::ceil(config.sizes.min_value)),
        static_cast<long long>(std::floor(config.sizes.max_value))));
    r.duration_ms = static_cast<std::uint32_t>(std::clamp(
        std::llround(config.durations.at(u)),
        std::max(1LL, static_cast<long long>(std::ceil(config.durations.min_value))),
        static_cast<long long>(std::floor(config.durations.max_value))));
  }
  return Catalog(std::move(records));
}

PopularityTable::PopularityTable(const Catalog& catalog) {
  if (catalog.empty()) throw std::invalid_argument("empty catalog");
  cumulative_.resize(catalog.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    acc += catalog[i].play_count;
    cumulative_[i] = acc;
  }
}

std::size_t PopularityTable::draw(CounterRng& rng) const {
  const double target = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
}

std::vector<ParticipantHistory> generate_participants(
    const Catalog& catalog, std::size_t n_participants, int days,
    std::uint64_t seed, double daily_views) {
  if (catalog.empty()) throw std::invalid_argument("empty catalog");
  if (n_participants == 0)
    throw ConfigError("n_participants", "must be at least 1");
  if (days < 0) throw ConfigError("days", "must be non-negative");
  const PopularityTable table(catalog);
  std::vector<ParticipantHistory> out(n_participants);
  detail::parallel_for(n_participants, 0, [&](std::size_t p) {
    auto rng = CounterRng::stream(seed, p, 0x9A27);
    auto& h = out[p];
    h.participant_id = static_cast<ParticipantId>(p);
    std::poisson_distribution<int> per_day(daily_views);
    for (int d = 0; d < days; ++d) {
      const int n = per_day(rng);
      const std::size_t first = h.events.size();
      for (int k = 0; k < n; ++k) {
        const auto offset = static_cast<std::int64_t>(rng.uniform() * kSecondsPerDay);
        h.events.push_back({d * kSecondsPerDay + offset,
                            catalog[table.draw(rng)].video_id});
      }
      std::stable_sort(h.events.begin() + first, h.events.end(),
                       [](const ViewEvent& a, const ViewEvent& b) {
                         return a.timestamp_s < b.timestamp_s;
                       });
    }
  });
  return out;
}

std::vector<double> selection_weights(const Catalog& catalog,
                                      std::span<const VideoId> pool,
                                      double beta) {
  if (pool.empty()) throw std::invalid_argument("empty video pool");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ConfigError("beta", "must lie in [0, 1]");
  std::vector<double> w(pool.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    w[i] = catalog.at(pool[i]).play_count;
    total += w[i];
  }
  const double uniform = (1.0 - beta) / static_cast<double>(pool.size());
  for (auto& x : w) x = beta * x / total + uniform;
  return w;
}

namespace {

std::size_t draw_index(std::span<const double> weights, CounterRng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double target = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (target < weights[i]) return i;
    target -= weights[i];
  }
  return weights.size() - 1;
}

}  // namespace

VideoId sample_video(const Catalog& catalog, std::span<const VideoId> pool,
                     double beta, CounterRng& rng) {
  const auto w = selection_weights(catalog, pool, beta);
  return pool[draw_index(w, rng)];
}

void UserGenConfig::validate() const {
  if (videos_per_user == 0) throw ConfigError("videos_per_user", "must be positive");
  if (window_days <= 0) throw ConfigError("window_days", "must be positive");
  if (batch_size == 0) throw ConfigError("batch_size", "must be positive");
  if (batch_shift_days < 0) throw ConfigError("batch_shift_days", "must be non-negative");
  if (k_min < 1 || k_max < k_min) throw ConfigError("k_range", "need 1 <= k_min <= k_max");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta", "must lie in [0, 1]");
}

std::vector<EmulatedUser> generate_users(
    const Catalog& catalog, std::span<const ParticipantHistory> participants,
    const UserGenConfig& config) {
  config.validate();
  if (participants.empty()) throw std::invalid_argument("no participants");

  std::int64_t horizon = 0;
  for (const auto& p : participants)
    if (!p.events.empty())
      horizon = std::max(horizon, (p.events.back().timestamp_s / kSecondsPerDay + 1) *
                                      kSecondsPerDay);

  const std::size_t n_batches =
      (config.n_users + config.batch_size - 1) / config.batch_size;
  std::vector<EmulatedUser> users(config.n_users);
  const auto n_part = static_cast<std::int64_t>(participants.size());

  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::int64_t t_s =
        static_cast<std::int64_t>(b) * config.batch_shift_days * kSecondsPerDay;
    const std::int64_t t_e = t_s + config.window_days * kSecondsPerDay;
    if (t_e > horizon)
      throw ConfigError("n_users", "batch " + std::to_string(b) + " window [" +
                                       std::to_string(t_s) + ", " +
                                       std::to_string(t_e) +
                                       ") lies outside the participant histories");

    // Distinct catalog indices each participant viewed inside the window.
    std::vector<std::vector<std::uint32_t>> seen(participants.size());
    for (std::size_t p = 0; p < participants.size(); ++p) {
      const auto& ev = participants[p].events;
      auto lo = std::lower_bound(ev.begin(), ev.end(), t_s,
                                 [](const ViewEvent& e, std::int64_t t) {
                                   return e.timestamp_s < t;
                                 });
      for (auto it = lo; it != ev.end() && it->timestamp_s < t_e; ++it) {
        auto idx = catalog.index_of(it->video_id);
        if (!idx)
          throw std::invalid_argument("participant history references unknown video " +
                                      std::to_string(it->video_id));
        seen[p].push_back(static_cast<std::uint32_t>(*idx));
      }
      std::sort(seen[p].begin(), seen[p].end());
      seen[p].erase(std::unique(seen[p].begin(), seen[p].end()), seen[p].end());
    }

    const std::size_t first = b * config.batch_size;
    const std::size_t count = std::min(config.batch_size, config.n_users - first);
    detail::parallel_for(count, config.threads, [&](std::size_t j) {
      const auto uid = static_cast<UserId>(first + j);
      EmulatedUser& u = users[uid];
      u.user_id = uid;
      u.window_start_s = t_s;
      u.window_end_s = t_e;
      u.beta = config.beta;

      auto rng = CounterRng::stream(config.seed, uid, 1);
      const std::int64_t k =
          std::min<std::int64_t>(rng.between(config.k_min, config.k_max), n_part);
      std::vector<ParticipantId> order(participants.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::int64_t i = 0; i < k; ++i) {
        const auto r = i + static_cast<std::int64_t>(rng.below(n_part - i));
        std::swap(order[i], order[r]);
      }
      u.personality.assign(order.begin(), order.begin() + k);
      std::sort(u.personality.begin(), u.personality.end());

      std::vector<std::uint32_t> pool;
      for (auto p : u.personality) pool.insert(pool.end(), seen[p].begin(), seen[p].end());
      std::sort(pool.begin(), pool.end());
      pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
      if (pool.empty())
        throw ConfigError("n_users", "batch " + std::to_string(b) +
                                         " has an empty window for user " +
                                         std::to_string(uid));

      double total = 0.0;
      for (auto i : pool) total += catalog[i].play_count;
      const double uniform = (1.0 - config.beta) / static_cast<double>(pool.size());
      std::vector<double> weight(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i)
        weight[i] = config.beta * catalog[pool[i]].play_count / total + uniform;

      // Exponential keys log(u)/w ranked descending reproduce successive
      // weighted draws without replacement, including their order.
      auto draw_rng = CounterRng::stream(config.seed, uid, 2);
      std::vector<std::pair<double, std::uint32_t>> keyed(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i)
        keyed[i] = {std::log(draw_rng.uniform_pos()) / weight[i],
                    static_cast<std::uint32_t>(i)};
      const std::size_t take = std::min(config.videos_per_user, pool.size());
      std::partial_sort(keyed.begin(), keyed.begin() + take, keyed.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first; });
      u.video_sequence.reserve(config.videos_per_user);
      for (std::size_t i = 0; i < take; ++i)
        u.video_sequence.push_back(catalog[pool[keyed[i].second]].video_id);

      // Pool exhausted: continue with replacement.
      if (take < config.videos_per_user) {
        std::vector<double> cumulative(pool.size());
        std::partial_sum(weight.begin(), weight.end(), cumulative.begin());
        while (u.video_sequence.size() < config.videos_per_user) {
          const double target = draw_rng.uniform() * cumulative.back();
          auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
          const std::size_t i = std::min<std::size_t>(it - cumulative.begin(), pool.size() - 1);
          u.video_sequence.push_back(catalog[pool[i]].video_id);
        }
      }
    });
  }
  return users;
}

std::vector<ManifestFile> build_manifests(const EmulatedUser& user,
                                          std::size_t manifest_len) {
  if (manifest_len == 0) throw ConfigError("manifest_len", "must be positive");
  std::vector<ManifestFile> out;
  const auto& seq = user.video_sequence;
  for (std::size_t start = 0, no = 0; start < seq.size(); start += manifest_len, ++no) {
    const std::size_t end = std::min(seq.size(), start + manifest_len);
    out.push_back({user.user_id, static_cast<std::uint32_t>(no),
                   std::vector<VideoId>(seq.begin() + start, seq.begin() + end)});
  }
  return out;
}

}  // namespace silc
