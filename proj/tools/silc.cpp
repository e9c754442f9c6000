// Command-line front end.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "silc/bench.hpp"
#include "silc/catalog_io.hpp"
#include "silc/error.hpp"
#include "silc/experiment.hpp"
#include "silc/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace silc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitIo = 3;

fs::path default_output_dir() {
  if (const char* env = std::getenv("SILC_OUTPUT_DIR"); env && *env) return env;
  return "silc-out";
}

json read_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config", path + ": " + e.what());
  }
}

json section(const json& config, const char* name) {
  if (!config.is_object()) throw ConfigError("config", "top level must be an object");
  for (const auto& [key, _] : config.items())
    if (key != "corpus" && key != "experiment") throw ConfigError(key, "unknown section");
  return config.contains(name) ? config.at(name) : json::object();
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

// Flags that mirror ExperimentSpec; applied over the config file only when
// given on the command line.
struct SpecFlags {
  std::vector<double> betas;
  std::vector<std::string> policies;
  std::vector<double> cache_gb;
  std::vector<std::size_t> manifest_lengths;
  std::string reorder;
  std::vector<std::string> params;
  std::optional<double> skip_first_fraction;
  std::optional<unsigned> jobs;
  std::optional<std::uint32_t> n_servers;
  std::optional<std::size_t> initial_clients, max_clients, refill_threshold, manifests_per_user,
      check_every;
  std::optional<std::int64_t> client_add_interval_ms;
  std::optional<double> duration_scale;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app, bool grid) {
    const char* many = grid ? "s" : "";
    app->add_option(std::string("--beta") + many, betas, "workload beta value(s)");
    app->add_option(std::string("--polic") + (grid ? "ies" : "y"), policies,
                    "llf fif lru lfu fifo gdsf lfuda random lecar topk");
    app->add_option("--cache-gb", cache_gb, "cluster-total cache size(s), decimal GB");
    app->add_option(std::string("--manifest-length") + many, manifest_lengths);
    app->add_option("--reorder", reorder, "on, off or both")->check(CLI::IsMember({"on", "off", "both"}));
    app->add_option("--param", params, "policy parameter as name=value");
    app->add_option("--skip-first-fraction", skip_first_fraction);
    app->add_option("--jobs", jobs, "concurrent cells (0 = all cores)");
    app->add_option("--n-servers", n_servers);
    app->add_option("--initial-clients", initial_clients);
    app->add_option("--max-clients", max_clients);
    app->add_option("--client-add-interval-ms", client_add_interval_ms);
    app->add_option("--refill-threshold", refill_threshold);
    app->add_option("--manifests-per-user", manifests_per_user, "0 = all of a user's manifests");
    app->add_option("--duration-scale", duration_scale);
    app->add_option("--check-every", check_every, "run invariant checks every N requests");
    app->add_option("--sim-seed", seed);
  }

  ExperimentSpec apply(json j) const {
    if (!betas.empty()) j["betas"] = betas;
    if (!policies.empty()) j["policies"] = policies;
    if (!cache_gb.empty()) j["cache_sizes_gb"] = cache_gb;
    if (!manifest_lengths.empty()) j["manifest_lengths"] = manifest_lengths;
    if (!reorder.empty()) j["reorder"] = reorder;
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw ConfigError("param", "expected name=value, got " + p);
      try {
        j["params"][p.substr(0, eq)] = std::stod(p.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw ConfigError("param", "not a number: " + p);
      }
    }
    if (skip_first_fraction) j["skip_first_fraction"] = *skip_first_fraction;
    if (jobs) j["jobs"] = *jobs;
    auto set = [&](const char* key, const auto& v) {
      if (v) j["cluster"][key] = *v;
    };
    set("n_servers", n_servers);
    set("initial_clients", initial_clients);
    set("max_clients", max_clients);
    set("client_add_interval_ms", client_add_interval_ms);
    set("refill_threshold", refill_threshold);
    set("manifests_per_user", manifests_per_user);
    set("duration_scale", duration_scale);
    set("check_every", check_every);
    set("seed", seed);
    return experiment_spec_from_json(j);
  }
};

void echo_config(const fs::path& dir, const json& corpus, const ExperimentSpec& spec) {
  auto out = open_out(dir / "experiment.json");
  out << json{{"corpus", corpus}, {"experiment", to_json(spec)}}.dump(2) << '\n';
}

int cmd_generate(const std::string& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<std::size_t> n_videos,
                 std::optional<std::size_t> n_users) {
  json j = section(read_config_file(config_path), "corpus");
  if (seed) j["seed"] = *seed;
  if (n_videos) j["catalog"]["n_videos"] = *n_videos;
  if (n_users) j["users"]["n_users"] = *n_users;
  const CorpusConfig config = corpus_config_from_json(j);
  const Corpus corpus = generate_corpus(config);
  write_corpus(corpus, out_dir);
  std::size_t users = 0;
  for (const auto& [beta, list] : corpus.users) users += list.size();
  std::cout << "wrote " << corpus.catalog.size() << " videos, " << corpus.participants.size()
            << " participants, " << users << " users across " << corpus.users.size()
            << " beta values to " << out_dir.string() << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const fs::path& corpus_dir, const fs::path& out_dir,
              const SpecFlags& flags, const std::string& csv_name) {
  const json config = read_config_file(config_path);
  const ExperimentSpec spec = flags.apply(section(config, "experiment"));
  const Corpus corpus = load_corpus(corpus_dir);
  fs::create_directories(out_dir);
  echo_config(out_dir, to_json(corpus.config), spec);
  auto csv = open_out(out_dir / csv_name);
  const auto rows = run_sweep(corpus, spec, &csv);
  std::cout << "wrote " << rows.size() << " rows to " << (out_dir / csv_name).string() << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config_path, const fs::path& corpus_dir, const fs::path& out_dir,
            const SpecFlags& flags, const std::string& trace_path) {
  json j = section(read_config_file(config_path), "experiment");
  // A single run defaults to beta 1 on a 100 GB cluster.
  if (!j.contains("betas")) j["betas"] = {1.0};
  if (!j.contains("cache_sizes_gb")) j["cache_sizes_gb"] = {100.0};
  const ExperimentSpec spec = flags.apply(j);
  if (spec.betas.size() != 1 || spec.cache_sizes_bytes.size() != 1 ||
      spec.manifest_lengths.size() != 1)
    throw ConfigError("run", "a single run takes one beta, cache size and manifest length");
  const Corpus corpus = load_corpus(corpus_dir);
  fs::create_directories(out_dir);
  echo_config(out_dir, to_json(corpus.config), spec);

  const auto cells = expand_grid(spec);
  auto csv = open_out(out_dir / "run.csv");
  write_report_header(csv);
  for (const auto& cell : cells) {
    auto result = run_cell(corpus.catalog, corpus.users_for(cell.beta), spec, cell);
    write_report_row(csv, result.report);
    write_report_row(std::cout, result.report);
    if (!trace_path.empty()) {
      fs::path p = trace_path;
      if (cells.size() > 1) p.replace_filename(p.stem().string() + "." + result.report.policy +
                                               p.extension().string());
      auto out = open_out(p);
      write_trace(out, result.simulation.trace);
    }
  }
  return kExitOk;
}

int cmd_bench(const BenchConfig& cfg, bool scaling) {
  const auto lru = bench_policy(PolicyKind::lru, cfg);
  const auto llf = bench_policy(PolicyKind::llf, cfg);
  auto row = [](const char* name, const LatencyStats& s) {
    std::cout << name << ',' << s.requests << ',' << format_double(s.median_ns) << ','
              << format_double(s.p90_ns) << ',' << format_double(s.p99_ns) << ','
              << format_double(s.mean_ns) << ',' << format_double(s.hit_rate) << '\n';
  };
  std::cout << "policy,requests,median_ns,p90_ns,p99_ns,mean_ns,hit_rate\n";
  row("lru", lru);
  row("llf", llf);
  std::cout << "llf/lru median ratio " << format_double(llf.median_ns / lru.median_ns) << '\n';
  if (scaling) {
    const auto fit = bench_scaling(PolicyKind::llf, {1'000, 10'000, 100'000}, cfg);
    for (const auto& [n, median] : fit.points)
      std::cout << "llf cache_objects=" << n << " median_ns=" << format_double(median) << '\n';
    std::cout << "llf latency exponent vs cache objects " << format_double(fit.exponent) << '\n';
  }
  return kExitOk;
}

int cmd_overlap(const fs::path& corpus_dir) {
  const Corpus corpus = load_corpus(corpus_dir);
  const auto s = overlap_stats(corpus.participants);
  std::cout << "distinct_videos " << s.distinct_videos << "\nmultiwatched_videos "
            << s.multiwatched_videos << "\nfraction_multiwatched "
            << format_double(s.fraction_multiwatched) << "\ngap_days,count\n";
  for (const auto& [bucket, count] : s.gap_histogram)
    std::cout << (bucket == kGapBuckets ? std::string(">=14") : std::to_string(bucket)) << ','
              << count << '\n';
  return kExitOk;
}

int cmd_pareto(const fs::path& corpus_dir) {
  const Corpus corpus = load_corpus(corpus_dir);
  std::vector<double> counts;
  for (const auto& v : corpus.catalog.records()) counts.push_back(v.play_count);
  const auto fit = pareto_fit(counts);
  std::cout << "n " << fit.n << "\nalpha_hat " << format_double(fit.alpha_hat)
            << "\nccdf_slope " << format_double(fit.ccdf_slope) << '\n';
  return kExitOk;
}

int cmd_alpha_study(const std::vector<double>& alphas, const OverlapStudyConfig& cfg) {
  const auto out = expected_overlap_study(alphas, cfg);
  std::cout << "alpha,mean_overlap\n";
  for (const auto& [alpha, overlap] : out)
    std::cout << format_double(alpha) << ',' << format_double(overlap) << '\n';
  return kExitOk;
}

int cmd_displacement(const std::string& config_path, const fs::path& corpus_dir,
                     const SpecFlags& flags) {
  ExperimentSpec spec = flags.apply(section(read_config_file(config_path), "experiment"));
  const Corpus corpus = load_corpus(corpus_dir);
  CellSpec cell{spec.betas.back(), PolicyKind::llf, spec.cache_sizes_bytes.front(),
                spec.manifest_lengths.front(), true};
  auto result = run_cell(corpus.catalog, corpus.users_for(cell.beta), spec, cell);
  std::cout << "displacement,count\n";
  for (const auto& [d, count] : result.simulation.displacement)
    std::cout << d << ',' << count << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lookahead caching simulator for short-video CDNs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_flag;
  std::string corpus_flag;
  auto out_dir = [&] { return out_dir_flag.empty() ? default_output_dir() : fs::path(out_dir_flag); };
  auto corpus_dir = [&] { return corpus_flag.empty() ? out_dir() : fs::path(corpus_flag); };
  auto common = [&](CLI::App* sub, bool needs_corpus) {
    sub->add_option("--config", config_path, "JSON config with corpus/experiment sections");
    sub->add_option("--out-dir", out_dir_flag, "output directory (default $SILC_OUTPUT_DIR)");
    if (needs_corpus) sub->add_option("--corpus", corpus_flag, "corpus directory (default --out-dir)");
  };

  auto* gen = app.add_subcommand("generate", "generate a synthetic corpus");
  common(gen, false);
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::size_t> gen_videos, gen_users;
  gen->add_option("--seed", gen_seed);
  gen->add_option("--n-videos", gen_videos);
  gen->add_option("--n-users", gen_users);

  SpecFlags run_flags, sweep_flags, disp_flags;
  std::string trace_path;
  auto* run = app.add_subcommand("run", "simulate one cell (reorder=both gives two rows)");
  common(run, true);
  run_flags.add(run, false);
  run->add_option("--trace", trace_path, "write the event trace as JSON lines");

  auto* sweep = app.add_subcommand("sweep", "simulate the full experiment grid");
  common(sweep, true);
  sweep_flags.add(sweep, true);
  std::string csv_name = "results.csv";
  sweep->add_option("--csv", csv_name, "CSV file name inside --out-dir");

  auto* bench = app.add_subcommand("bench", "per-request latency of llf vs lru");
  BenchConfig bench_cfg;
  bool bench_scaling_flag = false;
  bench->add_option("--requests", bench_cfg.requests);
  bench->add_option("--cache-objects", bench_cfg.cache_objects);
  bench->add_option("--seed", bench_cfg.seed);
  bench->add_flag("--scaling", bench_scaling_flag, "also time llf at 1e3, 1e4, 1e5 objects");

  auto* analyze = app.add_subcommand("analyze", "metrics over corpora and studies");
  analyze->require_subcommand(1);
  auto* overlap = analyze->add_subcommand("overlap", "cross-participant overlap statistics");
  common(overlap, true);
  auto* pareto = analyze->add_subcommand("pareto", "Pareto fit of catalog play counts");
  common(pareto, true);
  auto* study = analyze->add_subcommand("alpha-study", "expected overlap as a function of alpha");
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  OverlapStudyConfig study_cfg;
  study->add_option("--alphas", alphas);
  study->add_option("--n-users", study_cfg.n_users);
  study->add_option("--n-samples", study_cfg.n_samples);
  study->add_option("--n-runs", study_cfg.n_runs);
  study->add_option("--n-videos", study_cfg.n_videos);
  study->add_option("--seed", study_cfg.seed);
  auto* disp = analyze->add_subcommand("displacement", "reorder displacement histogram for silc");
  common(disp, true);
  disp_flags.add(disp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(config_path, out_dir(), gen_seed, gen_videos, gen_users);
    if (*run) return cmd_run(config_path, corpus_dir(), out_dir(), run_flags, trace_path);
    if (*sweep) return cmd_sweep(config_path, corpus_dir(), out_dir(), sweep_flags, csv_name);
    if (*bench) return cmd_bench(bench_cfg, bench_scaling_flag);
    if (*overlap) return cmd_overlap(corpus_dir());
    if (*pareto) return cmd_pareto(corpus_dir());
    if (*study) return cmd_alpha_study(alphas, study_cfg);
    if (*disp) return cmd_displacement(config_path, corpus_dir(), disp_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}
