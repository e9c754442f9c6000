#include "silc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "silc/catalog_io.hpp"
#include "silc/error.hpp"

namespace silc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads fields from one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
    if (!j.is_object()) throw ConfigError(scope_.empty() ? "config" : scope_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path(key), e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const std::string& key) const {
    return scope_.empty() ? key : scope_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown field");
  }

 private:
  const json& j_;
  std::string scope_;
  std::set<std::string> seen_;
};

json curve_to_json(const QuantileCurve& c) {
  json anchors = json::array();
  for (const auto& a : c.anchors) anchors.push_back({a.fraction, a.value});
  return {{"min", c.min_value}, {"max", c.max_value}, {"anchors", anchors}};
}

QuantileCurve curve_from_json(const json& j, const std::string& scope, QuantileCurve c) {
  Fields f(j, scope);
  f.get("min", c.min_value);
  f.get("max", c.max_value);
  if (const json* a = f.child("anchors")) {
    c.anchors.clear();
    try {
      for (const auto& pair : *a)
        c.anchors.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    } catch (const json::exception& e) {
      throw ConfigError(scope + ".anchors", e.what());
    }
  }
  f.finish();
  return c;
}

void check_betas(const std::vector<double>& betas) {
  if (betas.empty()) throw ConfigError("betas", "must not be empty");
  for (double b : betas)
    if (!(b >= 0 && b <= 1)) throw ConfigError("betas", "every beta must lie in [0, 1]");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("missing corpus file " + p.string());
  return in;
}

}  // namespace

void CorpusConfig::validate() const {
  catalog.validate();
  if (n_participants == 0) throw ConfigError("participants.count", "must be at least 1");
  if (days < 1) throw ConfigError("participants.days", "must be at least 1");
  if (!(daily_views > 0)) throw ConfigError("participants.daily_views", "must be positive");
  users.validate();
  check_betas(betas);
  if (manifest_length == 0) throw ConfigError("manifest_length", "must be positive");
}

json to_json(const CorpusConfig& c) {
  return {
      {"seed", c.catalog.seed},
      {"catalog",
       {{"n_videos", c.catalog.n_videos},
        {"alpha", c.catalog.alpha},
        {"size_quantiles", curve_to_json(c.catalog.sizes)},
        {"duration_quantiles", curve_to_json(c.catalog.durations)}}},
      {"participants",
       {{"count", c.n_participants}, {"days", c.days}, {"daily_views", c.daily_views}}},
      {"users",
       {{"n_users", c.users.n_users},
        {"videos_per_user", c.users.videos_per_user},
        {"window_days", c.users.window_days},
        {"batch_size", c.users.batch_size},
        {"batch_shift_days", c.users.batch_shift_days},
        {"k_min", c.users.k_min},
        {"k_max", c.users.k_max}}},
      {"betas", c.betas},
      {"manifest_length", c.manifest_length},
  };
}

CorpusConfig corpus_config_from_json(const json& j) {
  CorpusConfig c;
  Fields f(j, "");
  std::uint64_t seed = c.catalog.seed;
  f.get("seed", seed);
  c.catalog.seed = seed;
  c.users.seed = seed;
  if (const json* cat = f.child("catalog")) {
    Fields g(*cat, "catalog");
    g.get("n_videos", c.catalog.n_videos);
    g.get("alpha", c.catalog.alpha);
    if (const json* s = g.child("size_quantiles"))
      c.catalog.sizes = curve_from_json(*s, "catalog.size_quantiles", c.catalog.sizes);
    if (const json* d = g.child("duration_quantiles"))
      c.catalog.durations = curve_from_json(*d, "catalog.duration_quantiles", c.catalog.durations);
    g.finish();
  }
  if (const json* p = f.child("participants")) {
    Fields g(*p, "participants");
    g.get("count", c.n_participants);
    g.get("days", c.days);
    g.get("daily_views", c.daily_views);
    g.finish();
  }
  if (const json* u = f.child("users")) {
    Fields g(*u, "users");
    g.get("n_users", c.users.n_users);
    g.get("videos_per_user", c.users.videos_per_user);
    g.get("window_days", c.users.window_days);
    g.get("batch_size", c.users.batch_size);
    g.get("batch_shift_days", c.users.batch_shift_days);
    g.get("k_min", c.users.k_min);
    g.get("k_max", c.users.k_max);
    g.finish();
  }
  f.get("betas", c.betas);
  f.get("manifest_length", c.manifest_length);
  f.finish();
  c.validate();
  return c;
}

const std::vector<EmulatedUser>& Corpus::users_for(double beta) const {
  auto it = users.find(beta);
  if (it == users.end())
    throw ConfigError("betas", "corpus has no users for beta " + beta_label(beta));
  return it->second;
}

Corpus generate_corpus(const CorpusConfig& config) {
  config.validate();
  Corpus c;
  c.config = config;
  c.config.users.seed = config.catalog.seed;
  c.catalog = generate_catalog(config.catalog);
  c.participants = generate_participants(c.catalog, config.n_participants, config.days,
                                         config.catalog.seed, config.daily_views);
  for (double beta : config.betas) {
    UserGenConfig u = c.config.users;
    u.beta = beta;
    c.users[beta] = generate_users(c.catalog, c.participants, u);
  }
  return c;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "catalog.tsv");
    write_catalog(out, corpus.catalog);
  }
  {
    auto out = open_out(dir / "participants.tsv");
    write_participants(out, corpus.participants);
  }
  {
    auto out = open_out(dir / "users.jsonl");
    for (const auto& [beta, users] : corpus.users) write_users(out, users);
  }
  {
    auto out = open_out(dir / "manifests.jsonl");
    for (const auto& [beta, users] : corpus.users)
      for (const auto& u : users)
        write_manifests(out, build_manifests(u, corpus.config.manifest_length), beta);
  }
  {
    auto out = open_out(dir / "config.json");
    out << to_json(corpus.config).dump(2) << '\n';
  }
  json files = json::array();
  for (const char* name : kCorpusFiles)
    files.push_back({{"file", name}, {"sha256", file_digest(dir / name)}});
  auto out = open_out(dir / "index.json");
  out << json{{"seed", corpus.config.catalog.seed}, {"files", files}}.dump(2) << '\n';
  if (!out) throw IoError("write failed in " + dir.string());
}

Corpus load_corpus(const fs::path& dir) {
  json index;
  {
    auto in = open_in(dir / "index.json");
    try {
      index = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError((dir / "index.json").string() + ": " + e.what());
    }
  }
  for (const char* name : kCorpusFiles) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw IoError("missing corpus file " + p.string());
    std::string expected;
    for (const auto& f : index.value("files", json::array()))
      if (f.value("file", "") == name) expected = f.value("sha256", "");
    if (expected.empty()) throw IoError(p.string() + " is not listed in index.json");
    if (file_digest(p) != expected) throw IoError(p.string() + " does not match its digest");
  }

  Corpus c;
  {
    auto in = open_in(dir / "config.json");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError((dir / "config.json").string() + ": " + e.what());
    }
    c.config = corpus_config_from_json(j);
  }
  {
    auto in = open_in(dir / "catalog.tsv");
    c.catalog = read_catalog(in);
  }
  {
    auto in = open_in(dir / "participants.tsv");
    c.participants = read_participants(in);
  }
  {
    auto in = open_in(dir / "users.jsonl");
    for (auto& u : read_users(in)) c.users[u.beta].push_back(std::move(u));
  }
  return c;
}

ReorderMode parse_reorder_mode(std::string_view s) {
  if (s == "off") return ReorderMode::off;
  if (s == "on") return ReorderMode::on;
  if (s == "both") return ReorderMode::both;
  throw ConfigError("reorder", "expected on, off or both");
}

std::string_view reorder_mode_name(ReorderMode mode) {
  switch (mode) {
    case ReorderMode::off: return "off";
    case ReorderMode::on: return "on";
    case ReorderMode::both: return "both";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  check_betas(betas);
  if (policies.empty()) throw ConfigError("policies", "must not be empty");
  if (cache_sizes_bytes.empty()) throw ConfigError("cache_sizes", "must not be empty");
  if (manifest_lengths.empty()) throw ConfigError("manifest_lengths", "must not be empty");
  if (cluster.n_servers < 1) throw ConfigError("n_servers", "must be at least 1");
  for (auto b : cache_sizes_bytes) {
    if (b == 0) throw ConfigError("cache_sizes", "must be positive");
    if (b % cluster.n_servers != 0)
      throw ConfigError("cache_sizes", "each size must divide evenly across n_servers");
  }
  for (auto len : manifest_lengths)
    if (len < 2) throw ConfigError("manifest_lengths", "must be at least 2");
  if (!(skip_first_fraction >= 0 && skip_first_fraction < 1))
    throw ConfigError("skip_first_fraction", "must lie in [0, 1)");
  for (auto p : policies) {
    CacheConfig cc;
    cc.policy = p;
    cc.params = params;
    cc.capacity_bytes = cache_sizes_bytes.front() / cluster.n_servers;
    cc.validate();
  }
  for (auto len : manifest_lengths) {
    CellSpec cell;
    cell.manifest_length = len;
    cell.cache_bytes = cache_sizes_bytes.front();
    cluster_for(*this, cell).validate(len);
  }
}

json to_json(const ExperimentSpec& s) {
  std::vector<std::string> policies;
  for (auto p : s.policies) policies.emplace_back(policy_name(p));
  std::vector<double> sizes;
  for (auto b : s.cache_sizes_bytes) sizes.push_back(static_cast<double>(b) / kBytesPerGB);
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  return {
      {"betas", s.betas},
      {"policies", policies},
      {"cache_sizes_gb", sizes},
      {"manifest_lengths", s.manifest_lengths},
      {"reorder", reorder_mode_name(s.reorder)},
      {"params", params},
      {"skip_first_fraction", s.skip_first_fraction},
      {"jobs", s.jobs},
      {"cluster",
       {{"n_servers", s.cluster.n_servers},
        {"initial_clients", s.cluster.initial_clients},
        {"max_clients", s.cluster.max_clients},
        {"client_add_interval_ms", s.cluster.client_add_interval_ms},
        {"refill_threshold", s.cluster.refill_threshold},
        {"manifests_per_user", s.cluster.manifests_per_user},
        {"duration_scale", s.cluster.duration_scale},
        {"seed", s.cluster.seed},
        {"check_every", s.cluster.check_every}}},
  };
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  ExperimentSpec s;
  Fields f(j, "");
  f.get("betas", s.betas);
  std::vector<std::string> policies;
  f.get("policies", policies);
  if (!policies.empty()) {
    s.policies.clear();
    for (const auto& p : policies) s.policies.push_back(parse_policy(p));
  }
  std::vector<double> sizes;
  f.get("cache_sizes_gb", sizes);
  if (!sizes.empty()) {
    s.cache_sizes_bytes.clear();
    for (double gb : sizes) {
      if (!(gb > 0)) throw ConfigError("cache_sizes_gb", "must be positive");
      s.cache_sizes_bytes.push_back(static_cast<std::uint64_t>(std::llround(gb * kBytesPerGB)));
    }
  }
  f.get("manifest_lengths", s.manifest_lengths);
  std::string reorder(reorder_mode_name(s.reorder));
  f.get("reorder", reorder);
  s.reorder = parse_reorder_mode(reorder);
  std::map<std::string, double> params;
  f.get("params", params);
  for (const auto& [k, v] : params) s.params[k] = v;
  f.get("skip_first_fraction", s.skip_first_fraction);
  f.get("jobs", s.jobs);
  if (const json* c = f.child("cluster")) {
    Fields g(*c, "cluster");
    g.get("n_servers", s.cluster.n_servers);
    g.get("initial_clients", s.cluster.initial_clients);
    g.get("max_clients", s.cluster.max_clients);
    g.get("client_add_interval_ms", s.cluster.client_add_interval_ms);
    g.get("refill_threshold", s.cluster.refill_threshold);
    g.get("manifests_per_user", s.cluster.manifests_per_user);
    g.get("duration_scale", s.cluster.duration_scale);
    g.get("seed", s.cluster.seed);
    g.get("check_every", s.cluster.check_every);
    g.finish();
  }
  f.finish();
  s.validate();
  return s;
}

std::string policy_label(PolicyKind policy, bool reorder) {
  if (policy == PolicyKind::llf) return reorder ? "silc" : "silc_nr";
  std::string name(policy_name(policy));
  return reorder ? name + "+reorder" : name;
}

std::string beta_label(double beta) { return format_double(beta); }

std::vector<CellSpec> expand_grid(const ExperimentSpec& spec) {
  std::vector<bool> modes;
  if (spec.reorder != ReorderMode::off) modes.push_back(true);
  if (spec.reorder != ReorderMode::on) modes.push_back(false);
  std::vector<CellSpec> cells;
  for (double beta : spec.betas)
    for (auto len : spec.manifest_lengths)
      for (auto bytes : spec.cache_sizes_bytes)
        for (auto policy : spec.policies)
          for (bool r : modes) cells.push_back({beta, policy, bytes, len, r});
  return cells;
}

ClusterConfig cluster_for(const ExperimentSpec& spec, const CellSpec& cell) {
  ClusterConfig c = spec.cluster;
  const double scale = static_cast<double>(cell.manifest_length) / kManifestLength;
  if (spec.cluster.manifests_per_user != 0) {
    const std::size_t budget = spec.cluster.manifests_per_user * kManifestLength;
    c.manifests_per_user = (budget + cell.manifest_length - 1) / cell.manifest_length;
  }
  const auto threshold =
      static_cast<std::size_t>(std::llround(static_cast<double>(spec.cluster.refill_threshold) * scale));
  c.refill_threshold = std::min(threshold, cell.manifest_length - 1);
  c.per_server_capacity_bytes = cell.cache_bytes / spec.cluster.n_servers;
  c.reorder_enabled = cell.reorder;
  return c;
}

CellResult run_cell(const Catalog& catalog, std::span<const EmulatedUser> users,
                    const ExperimentSpec& spec, const CellSpec& cell) {
  const ClusterConfig cluster = cluster_for(spec, cell);
  CacheConfig cache;
  cache.capacity_bytes = cluster.per_server_capacity_bytes;
  cache.policy = cell.policy;
  cache.params = spec.params;
  cache.validate();

  const auto workload = build_workload(users, cell.manifest_length);
  CellResult r;
  r.simulation = run_simulation(catalog, workload, cluster, cache);
  r.report = summarize(r.simulation.trace, catalog, spec.skip_first_fraction);
  r.report.workload = beta_label(cell.beta);
  r.report.policy = policy_label(cell.policy, cell.reorder);
  r.report.cache_gb = static_cast<double>(cell.cache_bytes) / kBytesPerGB;
  if (auto err = check_report(r.report, cell.policy != PolicyKind::topk); !err.empty())
    throw InvariantViolation(r.report.policy + " at beta " + r.report.workload + ": " + err);
  return r;
}

std::vector<RunReport> run_sweep(const Corpus& corpus, const ExperimentSpec& spec,
                                 std::ostream* csv) {
  spec.validate();
  const auto cells = expand_grid(spec);
  for (double beta : spec.betas) corpus.users_for(beta);

  std::vector<std::optional<RunReport>> rows(cells.size());
  std::mutex mutex;
  std::size_t next_row = 0;
  if (csv) write_report_header(*csv);
  detail::parallel_for(cells.size(), spec.jobs, [&](std::size_t i) {
    const CellSpec& cell = cells[i];
    auto result = run_cell(corpus.catalog, corpus.users_for(cell.beta), spec, cell);
    std::lock_guard lock(mutex);
    rows[i] = std::move(result.report);
    while (next_row < rows.size() && rows[next_row]) {
      if (csv) {
        write_report_row(*csv, *rows[next_row]);
        csv->flush();
        if (!*csv) throw IoError("failed to append a report row");
      }
      ++next_row;
    }
  });

  std::vector<RunReport> out;
  out.reserve(rows.size());
  for (auto& r : rows) {
    if (!r) throw InvariantViolation("sweep grid incomplete");
    out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace silc
