#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "silc/cache.hpp"
#include "silc/catalog.hpp"
#include "silc/cluster.hpp"
#include "silc/metrics.hpp"

namespace silc {

/// Cache sizes on the command line and in reports use decimal gigabytes.
inline constexpr double kBytesPerGB = 1e9;

struct CorpusConfig {
  CatalogConfig catalog;
  std::size_t n_participants = 100;
  int days = 180;
  double daily_views = kDailyViews;
  UserGenConfig users;  // users.beta is ignored; see betas
  std::vector<double> betas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t manifest_length = kManifestLength;

  void validate() const;
};

nlohmann::json to_json(const CorpusConfig& config);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
CorpusConfig corpus_config_from_json(const nlohmann::json& j);

struct Corpus {
  CorpusConfig config;
  Catalog catalog;
  std::vector<ParticipantHistory> participants;
  std::map<double, std::vector<EmulatedUser>> users;  // keyed by beta

  const std::vector<EmulatedUser>& users_for(double beta) const;
};

Corpus generate_corpus(const CorpusConfig& config);

inline constexpr const char* kCorpusFiles[] = {"catalog.tsv", "participants.tsv", "users.jsonl",
                                               "manifests.jsonl", "config.json"};

/// Writes the five corpus files plus index.json (file name, sha256, seed).
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Throws IoError naming the first missing or corrupted file.
Corpus load_corpus(const std::filesystem::path& dir);

enum class ReorderMode { off, on, both };
ReorderMode parse_reorder_mode(std::string_view s);
std::string_view reorder_mode_name(ReorderMode mode);

struct ExperimentSpec {
  std::vector<double> betas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<PolicyKind> policies = {PolicyKind::llf,   PolicyKind::fif,  PolicyKind::lru,
                                      PolicyKind::lfu,   PolicyKind::fifo, PolicyKind::gdsf,
                                      PolicyKind::lfuda, PolicyKind::random, PolicyKind::lecar};
  /// Cluster totals, split evenly across servers.
  std::vector<std::uint64_t> cache_sizes_bytes = {10'000'000'000, 50'000'000'000,
                                                  100'000'000'000, 500'000'000'000,
                                                  1'000'000'000'000};
  std::vector<std::size_t> manifest_lengths = {kManifestLength};
  ReorderMode reorder = ReorderMode::both;
  ClusterConfig cluster;
  PolicyParams params;
  double skip_first_fraction = 0.0;
  unsigned jobs = 0;  // 0 = hardware concurrency

  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

struct CellSpec {
  double beta = 1.0;
  PolicyKind policy = PolicyKind::llf;
  std::uint64_t cache_bytes = 0;  // cluster total
  std::size_t manifest_length = kManifestLength;
  bool reorder = true;
};

/// "silc" / "silc_nr" for llf, otherwise the policy name with a
/// "+reorder" suffix when reordering is on.
std::string policy_label(PolicyKind policy, bool reorder);
std::string beta_label(double beta);

/// Grid order: beta, manifest length, cache size, policy, reorder.
std::vector<CellSpec> expand_grid(const ExperimentSpec& spec);

/// The refill threshold and number of manifests scale with the manifest
/// length so every length watches the same videos and refills at the same
/// fraction of a manifest.
ClusterConfig cluster_for(const ExperimentSpec& spec, const CellSpec& cell);

struct CellResult {
  RunReport report;
  SimulationResult simulation;
};

/// Runs one cell. Throws InvariantViolation when the report breaks its
/// invariants or the floor exceeds the miss rate.
CellResult run_cell(const Catalog& catalog, std::span<const EmulatedUser> users,
                    const ExperimentSpec& spec, const CellSpec& cell);

/// Runs every cell with up to spec.jobs in flight. Rows are streamed to
/// `csv` (when given) in grid order by whichever worker completes the
/// next pending row.
std::vector<RunReport> run_sweep(const Corpus& corpus, const ExperimentSpec& spec,
                                 std::ostream* csv = nullptr);

}  // namespace silc
