#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "silc/catalog.hpp"
#include "silc/cluster.hpp"

namespace silc {

struct RunReport {
  std::string workload;  // beta label
  std::string policy;
  double cache_gb = 0;
  double byte_hit_rate = 0;
  double byte_miss_rate = 0;
  double object_hit_rate = 0;
  double object_miss_rate = 0;
  std::uint64_t midgress_bytes = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t request_count = 0;
  double compulsory_floor = 0;
};

/// Aggregates raw counts and bytes over all video events of the trace
/// (every server) before dividing. The first `skip_first_fraction` of the
/// video events is excluded. The floor is computed over the same events.
/// Throws std::invalid_argument on a trace with no video events.
RunReport summarize(std::span<const RequestEvent> trace, const Catalog& catalog,
                    double skip_first_fraction = 0.0);

/// Checks rate complements, the midgress identity and floor dominance.
/// The floor only bounds caches that start empty, so preloaded runs pass
/// enforce_floor = false. Returns the first violation, or an empty string.
std::string check_report(const RunReport& report, bool enforce_floor = true);

inline constexpr const char* kReportHeader =
    "workload,policy,cache_gb,byte_hit,byte_miss,obj_hit,obj_miss,midgress_bytes,requests,floor";
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const RunReport& report);
std::vector<RunReport> read_reports(std::istream& in);

struct OverlapStats {
  double fraction_multiwatched = 0;
  std::uint64_t distinct_videos = 0;
  std::uint64_t multiwatched_videos = 0;
  /// Bucket b < 14 counts gaps in [24h*b, 24h*(b+1)); bucket 14 is overflow.
  std::map<int, std::uint64_t> gap_histogram;
};

inline constexpr int kGapBuckets = 14;

/// For every video with at least two distinct viewers, the gap from its
/// first viewer's first view to each other viewer's first view.
OverlapStats overlap_stats(std::span<const ParticipantHistory> histories);

struct OverlapStudyConfig {
  std::size_t n_users = 100;
  std::size_t n_samples = 150;
  std::size_t n_runs = 100;
  std::size_t n_videos = 10'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Mean pairwise count of shared distinct videos among users who each draw
/// n_samples distinct videos popularity-proportionally from a fresh
/// Pareto(alpha) catalog, averaged over runs.
std::map<double, double> expected_overlap_study(std::span<const double> alphas,
                                                const OverlapStudyConfig& config = {});

struct ParetoFit {
  double alpha_hat = 0;
  double ccdf_slope = 0;  // least-squares slope of log CCDF vs log x
  std::size_t n = 0;
};

/// alpha_hat = n / sum ln(x_i / x_m). Throws on values below x_m.
ParetoFit pareto_fit(std::span<const double> values, double x_m = 1.0);

}  // namespace silc
