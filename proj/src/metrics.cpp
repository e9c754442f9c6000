#include "silc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "parallel.hpp"
#include "silc/catalog_io.hpp"
#include "silc/error.hpp"

namespace silc {

RunReport summarize(std::span<const RequestEvent> trace, const Catalog& catalog,
                    double skip_first_fraction) {
  std::size_t n_video = 0;
  for (const auto& e : trace) n_video += e.kind == EventKind::video;
  if (n_video == 0) throw std::invalid_argument("summarize: trace has no video events");
  if (!(skip_first_fraction >= 0 && skip_first_fraction < 1))
    throw ConfigError("skip_first_fraction", "must lie in [0, 1)");
  const auto skip = static_cast<std::size_t>(std::floor(skip_first_fraction * n_video));

  RunReport r;
  std::uint64_t hits = 0;
  std::uint64_t hit_bytes = 0;
  std::uint64_t distinct_bytes = 0;
  std::unordered_set<VideoId> seen;
  std::size_t k = 0;
  for (const auto& e : trace) {
    if (e.kind != EventKind::video) continue;
    if (k++ < skip) continue;
    if (!catalog.empty() && catalog.at(e.video).size_bytes != e.bytes)
      throw std::invalid_argument("summarize: trace bytes disagree with catalog for video " +
                                  std::to_string(e.video));
    ++r.request_count;
    r.total_bytes += e.bytes;
    if (e.hit) {
      ++hits;
      hit_bytes += e.bytes;
    } else {
      r.midgress_bytes += e.bytes;
    }
    if (seen.insert(e.video).second) distinct_bytes += e.bytes;
  }
  const auto total = static_cast<double>(r.total_bytes);
  const auto count = static_cast<double>(r.request_count);
  r.byte_hit_rate = static_cast<double>(hit_bytes) / total;
  r.byte_miss_rate = static_cast<double>(r.midgress_bytes) / total;
  r.object_hit_rate = static_cast<double>(hits) / count;
  r.object_miss_rate = static_cast<double>(r.request_count - hits) / count;
  r.compulsory_floor = static_cast<double>(distinct_bytes) / total;
  return r;
}

std::string check_report(const RunReport& r, bool enforce_floor) {
  constexpr double kTol = 1e-9;
  if (std::abs(r.byte_hit_rate + r.byte_miss_rate - 1.0) > kTol)
    return "byte hit + miss != 1";
  if (std::abs(r.object_hit_rate + r.object_miss_rate - 1.0) > kTol)
    return "object hit + miss != 1";
  if (std::abs(static_cast<double>(r.midgress_bytes) -
               r.byte_miss_rate * static_cast<double>(r.total_bytes)) > 1.0)
    return "midgress bytes != byte miss rate x total bytes";
  if (enforce_floor && r.byte_miss_rate + kTol < r.compulsory_floor) return "byte miss rate below the compulsory floor";
  return {};
}

void write_report_header(std::ostream& out) { out << kReportHeader << '\n'; }

void write_report_row(std::ostream& out, const RunReport& r) {
  out << r.workload << ',' << r.policy << ',' << format_double(r.cache_gb) << ','
      << format_double(r.byte_hit_rate) << ',' << format_double(r.byte_miss_rate) << ','
      << format_double(r.object_hit_rate) << ',' << format_double(r.object_miss_rate) << ','
      << r.midgress_bytes << ',' << r.request_count << ','
      << format_double(r.compulsory_floor) << '\n';
}

std::vector<RunReport> read_reports(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw IoError("report CSV: unexpected header");
  std::vector<RunReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[10];
    for (auto& x : f) std::getline(ss, x, ',');
    RunReport r;
    r.workload = f[0];
    r.policy = f[1];
    r.cache_gb = std::stod(f[2]);
    r.byte_hit_rate = std::stod(f[3]);
    r.byte_miss_rate = std::stod(f[4]);
    r.object_hit_rate = std::stod(f[5]);
    r.object_miss_rate = std::stod(f[6]);
    r.midgress_bytes = std::stoull(f[7]);
    r.request_count = std::stoull(f[8]);
    r.compulsory_floor = std::stod(f[9]);
    r.total_bytes = r.byte_miss_rate > 0
                        ? static_cast<std::uint64_t>(std::llround(
                              static_cast<double>(r.midgress_bytes) / r.byte_miss_rate))
                        : 0;
    out.push_back(std::move(r));
  }
  return out;
}

OverlapStats overlap_stats(std::span<const ParticipantHistory> histories) {
  struct FirstView {
    VideoId video;
    std::int64_t ts;
    ParticipantId viewer;
  };
  std::vector<FirstView> views;
  for (const auto& h : histories) {
    std::vector<std::pair<VideoId, std::int64_t>> own;
    own.reserve(h.events.size());
    for (const auto& e : h.events) own.emplace_back(e.video_id, e.timestamp_s);
    std::sort(own.begin(), own.end());
    for (std::size_t i = 0; i < own.size(); ++i)
      if (i == 0 || own[i].first != own[i - 1].first)
        views.push_back({own[i].first, own[i].second, h.participant_id});
  }
  std::sort(views.begin(), views.end(), [](const FirstView& a, const FirstView& b) {
    return std::tie(a.video, a.ts, a.viewer) < std::tie(b.video, b.ts, b.viewer);
  });

  OverlapStats s;
  for (std::size_t i = 0; i < views.size();) {
    std::size_t j = i;
    while (j < views.size() && views[j].video == views[i].video) ++j;
    ++s.distinct_videos;
    if (j - i >= 2) {
      ++s.multiwatched_videos;
      for (std::size_t k = i + 1; k < j; ++k) {
        const std::int64_t gap = views[k].ts - views[i].ts;
        ++s.gap_histogram[static_cast<int>(std::min<std::int64_t>(gap / kSecondsPerDay, kGapBuckets))];
      }
    }
    i = j;
  }
  s.fraction_multiwatched =
      s.distinct_videos ? static_cast<double>(s.multiwatched_videos) / s.distinct_videos : 0.0;
  return s;
}

std::map<double, double> expected_overlap_study(std::span<const double> alphas,
                                                const OverlapStudyConfig& config) {
  for (double a : alphas)
    if (!(a > 0)) throw ConfigError("alpha", "must be positive");
  if (config.n_users < 2) throw ConfigError("n_users", "need at least two users");
  if (config.n_videos == 0 || config.n_runs == 0)
    throw ConfigError("n_videos", "catalog size and run count must be positive");

  const std::size_t n_cells = alphas.size() * config.n_runs;
  std::vector<double> shared(n_cells, 0.0);
  const std::size_t take = std::min(config.n_samples, config.n_videos);
  detail::parallel_for(n_cells, config.threads, [&](std::size_t cell) {
    const std::size_t a = cell / config.n_runs;
    const std::size_t run = cell % config.n_runs;
    const double alpha = alphas[a];
    auto rng = CounterRng::stream(config.seed, a, run);
    // log C_v for C_v = u^(-1/alpha); kept in log space so tiny alphas
    // do not overflow.
    std::vector<double> log_w(config.n_videos);
    for (auto& lw : log_w) lw = -std::log(rng.uniform_pos()) / alpha;

    std::vector<std::uint32_t> holders(config.n_videos, 0);
    std::vector<std::pair<double, std::uint32_t>> score(config.n_videos);
    for (std::size_t u = 0; u < config.n_users; ++u) {
      // Exponential race: the `take` smallest E_i / C_i are a weighted
      // sample without replacement.
      for (std::size_t i = 0; i < config.n_videos; ++i) {
        const double e = -std::log(rng.uniform_pos());
        score[i] = {e > 0 ? std::log(e) - log_w[i] : -std::numeric_limits<double>::infinity(),
                    static_cast<std::uint32_t>(i)};
      }
      std::nth_element(score.begin(), score.begin() + (take - 1), score.end());
      for (std::size_t i = 0; i < take; ++i) ++holders[score[i].second];
    }
    double pairs_sharing = 0;
    for (auto c : holders) pairs_sharing += 0.5 * c * (c - 1.0);
    const double n_pairs = 0.5 * config.n_users * (config.n_users - 1.0);
    shared[cell] = pairs_sharing / n_pairs;
  });

  std::map<double, double> out;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    double sum = 0;
    for (std::size_t run = 0; run < config.n_runs; ++run) sum += shared[a * config.n_runs + run];
    out[alphas[a]] = sum / static_cast<double>(config.n_runs);
  }
  return out;
}

ParetoFit pareto_fit(std::span<const double> values, double x_m) {
  if (!(x_m > 0)) throw ConfigError("x_m", "must be positive");
  if (values.empty()) throw std::invalid_argument("pareto_fit: no values");
  double log_sum = 0;
  for (double x : values) {
    if (!(x >= x_m)) throw std::invalid_argument("pareto_fit: value below x_m");
    log_sum += std::log(x / x_m);
  }
  ParetoFit fit;
  fit.n = values.size();
  fit.alpha_hat = log_sum > 0 ? static_cast<double>(fit.n) / log_sum
                              : std::numeric_limits<double>::infinity();

  // Empirical CCDF P(X >= x_(i)) = (n - i) / n, fitted on ranks whose
  // tail probability is at least 10/n.
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double tail = (n - static_cast<double>(i)) / n;
    if (tail * n < 10) break;
    const double x = std::log(sorted[i] / x_m);
    const double y = std::log(tail);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  const double denom = m * sxx - sx * sx;
  fit.ccdf_slope = denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
  return fit;
}

}  // namespace silc
