// Acceptance run: prints one PASS/FAIL line per criterion, then a summary.
// Exits 0 unless --strict is given and something failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oracles.hpp"
#include "silc/bench.hpp"
#include "silc/experiment.hpp"
#include "silc/llf.hpp"
#include "silc/reorder.hpp"

using namespace silc;

namespace {

int g_failed = 0;
int g_total = 0;

void verdict(const std::string& name, bool ok, const std::string& detail, double seconds) {
  ++g_total;
  if (!ok) ++g_failed;
  std::printf("%s %s (%.1fs): %s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
}

template <class Fn>
void criterion(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  verdict(name, ok, detail, s);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

VideoRecord rec(VideoId id, std::uint64_t size) { return {id, size, 1000, 1.0}; }

// --- lookahead eviction vs linear-scan oracle ------------------------------

bool oracle_equivalence(std::string& detail) {
  constexpr int kRuns = 10'000;
  std::size_t mismatches = 0, checks = 0;
  for (int run = 0; run < kRuns; ++run) {
    auto rng = CounterRng::stream(2024, run);
    const std::uint64_t cap = 3 + rng.below(8);
    std::vector<std::uint64_t> size(13);
    for (auto& s : size) s = 1 + rng.below(3);
    LlfCache llf(cap);
    oracle::NaiveLlf naive(cap);
    std::map<UserId, std::vector<VideoId>> pending;
    std::map<UserId, std::int64_t> position;
    for (int op = 0; op < 60; ++op) {
      const UserId u = static_cast<UserId>(rng.below(4));
      const auto roll = rng.below(100);
      if (roll < 25) {
        std::vector<VideoId> vs;
        std::vector<PendingEntry> es;
        for (std::uint64_t k = 0, n = 1 + rng.below(5); k < n; ++k) {
          const VideoId v = 1 + rng.below(12);
          vs.push_back(v);
          es.push_back({v, position[u]++});
        }
        llf.register_manifest(u, es);
        naive.register_manifest(u, vs);
        pending[u].insert(pending[u].end(), vs.begin(), vs.end());
      } else if (roll < 35) {
        llf.release_user(u);
        naive.release(u);
        pending.erase(u);
      } else {
        VideoId v = 1 + rng.below(12);
        auto& p = pending[u];
        if (!p.empty() && rng.below(10) < 7) v = p[rng.below(p.size())];
        if (auto it = std::find(p.begin(), p.end(), v); it != p.end()) p.erase(it);
        const auto a = llf.serve(u, rec(v, size[v]));
        const auto b = naive.serve(u, v, size[v]);
        ++checks;
        if (a.hit != b.hit || a.evicted != b.evicted) ++mismatches;
      }
      if (llf.object_count() > 0) {
        ++checks;
        if (llf.evict_candidate() != *naive.candidate()) ++mismatches;
      }
    }
  }
  detail = fmt("%zu mismatches over %d interleavings (%zu comparisons)", mismatches, kRuns, checks);
  return mismatches == 0;
}

// --- furthest-in-future vs exhaustive minimum ------------------------------

bool belady(std::string& detail) {
  std::size_t instances = 0, optimal = 0;
  std::vector<int> trace;
  std::function<void(std::size_t)> enumerate = [&](std::size_t len) {
    if (trace.size() == len) {
      for (int slots = 1; slots <= 3; ++slots) {
        auto cache = make_cache({static_cast<std::uint64_t>(slots), PolicyKind::fif, {}});
        std::vector<PendingEntry> manifest;
        for (std::size_t i = 0; i < trace.size(); ++i)
          manifest.push_back({static_cast<VideoId>(trace[i] + 1), static_cast<std::int64_t>(i)});
        cache->register_manifest(0, manifest);
        int misses = 0;
        for (int v : trace) misses += !cache->serve(0, rec(v + 1, 1)).hit;
        ++instances;
        optimal += misses == oracle::min_misses(trace, slots);
      }
      return;
    }
    for (int v = 0; v < 4; ++v) {
      trace.push_back(v);
      enumerate(len);
      trace.pop_back();
    }
  };
  for (std::size_t len = 1; len <= 8; ++len) enumerate(len);
  detail = fmt("%zu of %zu instances optimal", optimal, instances);
  return optimal == instances;
}

// --- lookahead frequency conservation ---------------------------------------

bool conservation(std::string& detail) {
  constexpr int kEvents = 100'000;
  auto rng = CounterRng::stream(77);
  LlfCache llf(40);
  std::map<UserId, std::vector<VideoId>> pending;
  std::map<UserId, std::int64_t> position;
  std::unordered_map<VideoId, std::int64_t> count;
  std::int64_t unserved = 0;
  std::size_t bad = 0;
  for (int ev = 0; ev < kEvents; ++ev) {
    const UserId u = static_cast<UserId>(rng.below(20));
    const auto roll = rng.below(100);
    VideoId touched = 0;
    if (roll < 20) {
      std::vector<PendingEntry> es;
      for (std::uint64_t k = 0, n = 1 + rng.below(10); k < n; ++k) {
        const VideoId v = 1 + rng.below(200);
        es.push_back({v, position[u]++});
        pending[u].push_back(v);
        ++count[v];
        ++unserved;
        touched = v;
      }
      llf.register_manifest(u, es);
    } else if (roll < 25) {
      for (VideoId v : pending[u]) --count[v];
      unserved -= static_cast<std::int64_t>(pending[u].size());
      pending.erase(u);
      llf.release_user(u);
    } else {
      VideoId v = 1 + rng.below(200);
      auto& p = pending[u];
      if (!p.empty() && rng.below(10) < 8) v = p[rng.below(p.size())];
      if (auto it = std::find(p.begin(), p.end(), v); it != p.end()) {
        p.erase(it);
        --count[v];
        --unserved;
      }
      llf.serve(u, rec(v, 1 + v % 7));
      touched = v;
    }
    if (llf.total_frequency() != unserved || llf.book().total_pending() != unserved) ++bad;
    if (touched && llf.lookahead_frequency(touched) != count[touched]) ++bad;
    if (ev % 1000 == 0) {
      for (const auto& [v, c] : count)
        if (llf.lookahead_frequency(v) != c) ++bad;
      llf.check_invariants();
    }
  }
  detail = fmt("%zu violations over %d events", bad, kEvents);
  return bad == 0;
}

// --- no manifests: llf evicts exactly like lru ------------------------------

bool degeneracy(std::string& detail) {
  constexpr int kTraces = 2000;
  std::size_t differing = 0, evictions = 0;
  for (int t = 0; t < kTraces; ++t) {
    auto rng = CounterRng::stream(31, t);
    const std::uint64_t cap = 5 + rng.below(30);
    auto llf = make_cache({cap, PolicyKind::llf, {}});
    auto lru = make_cache({cap, PolicyKind::lru, {}});
    const std::uint64_t n_videos = 2 + rng.below(60);
    bool same = true;
    for (int i = 0; i < 500; ++i) {
      const VideoId v = 1 + rng.below(n_videos);
      const auto r = rec(v, 1 + (mix64(v + 1000 * t) % 6));
      const auto a = llf->serve(static_cast<UserId>(rng.below(3)), r);
      const auto b = lru->serve(0, r);
      evictions += a.evicted.size();
      if (a.hit != b.hit || a.evicted != b.evicted) same = false;
    }
    differing += !same;
  }
  detail = fmt("%zu of %d traces differ (%zu evictions compared)", differing, kTraces, evictions);
  return differing == 0;
}

// --- reordering invariants ---------------------------------------------------

bool reorder_invariants(std::string& detail, const DisplacementHistogram& simulated) {
  constexpr int kManifests = 10'000;
  std::size_t broken = 0;
  DisplacementHistogram hist;
  for (int m = 0; m < kManifests; ++m) {
    auto rng = CounterRng::stream(404, m);
    std::vector<VideoId> entries(1 + rng.below(40));
    for (auto& v : entries) v = 1 + rng.below(60);
    std::unordered_set<VideoId> cached;
    std::unordered_map<VideoId, std::int64_t> freq;
    for (VideoId v = 1; v <= 60; ++v) {
      if (rng.below(4) == 0) cached.insert(v);
      freq[v] = rng.below(3) == 0 ? static_cast<std::int64_t>(rng.below(4)) : 0;
    }
    std::unordered_map<VideoId, std::int64_t> own;
    for (VideoId v : entries) ++own[v];
    for (auto& [v, f] : freq) f += own.count(v) ? own[v] : 0;
    const auto d = reorder_manifest(
        entries, [&](VideoId v) { return cached.contains(v); },
        [&](VideoId v) { return freq.at(v); });

    auto a = d.original, b = d.reordered;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    bool ok = d.original == entries && a == b && d.displacement.size() == entries.size();
    long sum = 0;
    for (std::size_t i = 0; ok && i < entries.size(); ++i) {
      sum += d.displacement[i];
      const long j = static_cast<long>(i) + d.displacement[i];
      ok = j >= 0 && j < static_cast<long>(entries.size()) && d.reordered[j] == entries[i];
    }
    // group order: cached, then shared uncached, then the rest
    auto group = [&](VideoId v) { return cached.contains(v) ? 0 : freq[v] > own[v] ? 1 : 2; };
    for (std::size_t i = 1; ok && i < d.reordered.size(); ++i)
      ok = group(d.reordered[i - 1]) <= group(d.reordered[i]);
    if (!ok || sum != 0) ++broken;
    accumulate_displacement(hist, d);
  }
  auto mean = [](const DisplacementHistogram& h) {
    double n = 0, s = 0;
    for (const auto& [k, c] : h) {
      n += static_cast<double>(c);
      s += static_cast<double>(k) * static_cast<double>(c);
    }
    return n > 0 ? s / n : 0.0;
  };
  const double m1 = mean(hist), m2 = mean(simulated);
  detail = fmt("%zu of %d manifests broken; mean displacement %.4f (random), %.4f (simulated silc)",
               broken, kManifests, m1, m2);
  return broken == 0 && std::abs(m1) < 0.05 && std::abs(m2) < 0.05;
}

// --- desk-scale workload criteria -------------------------------------------

struct Desk {
  Corpus corpus;
  ExperimentSpec base;
};

Desk make_desk() {
  CorpusConfig cc;
  cc.catalog.n_videos = 10'000;
  cc.users.n_users = 1000;
  cc.betas = {0.0, 0.8, 1.0};
  Desk d{generate_corpus(cc), {}};
  d.base.betas = cc.betas;
  return d;
}

using Table = std::map<std::tuple<std::string, std::string, double, std::size_t>, RunReport>;
// key: (workload, policy label, cache_gb, manifest length)

void run_into(Table& table, const Corpus& corpus, ExperimentSpec spec) {
  for (std::size_t len : spec.manifest_lengths) {
    auto s = spec;
    s.manifest_lengths = {len};
    for (const auto& r : run_sweep(corpus, s)) table[{r.workload, r.policy, r.cache_gb, len}] = r;
  }
}

ExperimentSpec all_plain(ExperimentSpec s) {
  s.policies.assign(std::begin(kAllPolicies), std::end(kAllPolicies));
  s.reorder = ReorderMode::off;
  return s;
}

ExperimentSpec silc_only(ExperimentSpec s) {
  s.policies = {PolicyKind::llf};
  s.reorder = ReorderMode::on;
  return s;
}

std::vector<std::string> labels_all() {
  std::vector<std::string> out = {"silc"};
  for (auto p : kAllPolicies) out.push_back(policy_label(p, false));
  return out;
}

bool beta_trend(std::string& detail, const Desk& desk, Table& t) {
  auto s = desk.base;
  s.cache_sizes_bytes = {1'000'000'000};
  run_into(t, desk.corpus, all_plain(s));
  run_into(t, desk.corpus, silc_only(s));
  bool trend = true, gap = true;
  std::ostringstream os;
  for (const auto& p : labels_all()) {
    const double m0 = t.at({"0", p, 1.0, 30}).byte_miss_rate;
    const double m1 = t.at({"1", p, 1.0, 30}).byte_miss_rate;
    os << p << " " << fmt("%.4f->%.4f", m0, m1) << (m1 < m0 ? "" : "(!)") << "; ";
    trend &= m1 < m0;
  }
  const std::vector<std::string> rivals = {"lru", "lfu", "fifo", "gdsf", "lfuda", "random", "lecar", "fif"};
  for (const char* b : {"0.8", "1"}) {
    const double silc = t.at({b, "silc", 1.0, 30}).byte_miss_rate;
    double worst = 1e9;
    std::string who;
    for (const auto& r : rivals) {
      const double other = t.at({b, r, 1.0, 30}).byte_miss_rate;
      const double rel = (other - silc) / other;
      if (rel < worst) worst = rel, who = r;
    }
    os << fmt("beta %s smallest gap %.2f%% vs %s; ", b, 100 * worst, who.c_str());
    gap &= worst >= 0.03;
  }
  os << "floor " << fmt("%.4f", t.at({"1", "silc", 1.0, 30}).compulsory_floor);
  detail = std::string(trend ? "trend holds" : "trend broken") + ", " +
           (gap ? "gap >= 3% holds" : "gap >= 3% not met") + ": " + os.str();
  return trend && gap;
}

std::uint64_t convergence_bytes(const Desk& desk, std::uint32_t n_servers) {
  std::vector<std::uint64_t> per(n_servers, 0);
  std::unordered_set<VideoId> seen;
  for (const auto& u : desk.corpus.users_for(1.0))
    for (VideoId v : u.video_sequence)
      if (seen.insert(v).second) per[shard(v, n_servers)] += desk.corpus.catalog.at(v).size_bytes;
  const std::uint64_t top = *std::max_element(per.begin(), per.end());
  // round up to whole megabytes so the GB label stays readable
  return n_servers * ((top + 999'999) / 1'000'000 * 1'000'000);
}

bool cache_convergence(std::string& detail, const Desk& desk, Table& t,
                       const std::vector<double>& sizes_gb, double conv_gb) {
  auto s = desk.base;
  s.betas = {1.0};
  s.cache_sizes_bytes.clear();
  for (double g : sizes_gb) s.cache_sizes_bytes.push_back(static_cast<std::uint64_t>(std::llround(g * kBytesPerGB)));
  run_into(t, desk.corpus, all_plain(s));
  run_into(t, desk.corpus, silc_only(s));
  bool mono = true, floor = true;
  std::ostringstream os;
  for (const auto& p : labels_all()) {
    std::string curve;
    double prev = 2.0;
    for (double g : sizes_gb) {
      const auto& r = t.at({"1", p, g, 30});
      if (r.byte_miss_rate > prev) {
        mono = false;
        os << p << " rises at " << g << " GB; ";
      }
      prev = r.byte_miss_rate;
    }
    const auto& last = t.at({"1", p, conv_gb, 30});
    if (p != "topk" && last.byte_miss_rate != last.compulsory_floor) {
      floor = false;
      os << p << fmt(" %.6f != floor %.6f; ", last.byte_miss_rate, last.compulsory_floor);
    }
  }
  const auto& tk = t.at({"1", "topk", conv_gb, 30});
  os << fmt("at %.3f GB every adaptive policy = floor %.4f (topk, preloaded, %.4f)", conv_gb,
            tk.compulsory_floor, tk.byte_miss_rate);
  detail = os.str();
  return mono && floor;
}

bool ablation(std::string& detail, const Desk& desk, Table& t) {
  auto s = desk.base;
  s.betas = {1.0};
  s.cache_sizes_bytes = {1'000'000'000};
  s.policies = {PolicyKind::llf};
  s.reorder = ReorderMode::both;
  s.manifest_lengths = {10, 20, 30};
  run_into(t, desk.corpus, s);
  bool ok = true;
  std::ostringstream os;
  double prev_on = 2, prev_off = 2;
  for (std::size_t len : s.manifest_lengths) {
    const double on = t.at({"1", "silc", 1.0, len}).byte_miss_rate;
    const double off = t.at({"1", "silc_nr", 1.0, len}).byte_miss_rate;
    os << fmt("len %zu silc %.4f silc_nr %.4f; ", len, on, off);
    ok &= on <= off && on <= prev_on && off <= prev_off;
    prev_on = on;
    prev_off = off;
  }
  detail = os.str();
  return ok;
}

bool topk(std::string& detail, const Table& t, const std::vector<double>& sizes_gb) {
  bool ok = true;
  std::ostringstream os;
  for (double g : sizes_gb) {
    const double k = t.at({"1", "topk", g, 30}).byte_miss_rate;
    const double s = t.at({"1", "silc", g, 30}).byte_miss_rate;
    os << fmt("%g GB topk %.4f silc %.4f; ", g, k, s);
    ok &= k > s;
  }
  detail = os.str();
  return ok;
}

// --- studies -----------------------------------------------------------------

bool overlap_alpha(std::string& detail) {
  const std::vector<double> alphas = {1.0, 3.0};
  const auto r = expected_overlap_study(alphas);  // 100 users x 150 samples x 100 runs
  detail = fmt("mean overlap %.3f at alpha 1, %.3f at alpha 3", r.at(1.0), r.at(3.0));
  return r.at(1.0) > r.at(3.0);
}

bool pareto(std::string& detail) {
  CatalogConfig cfg;
  cfg.n_videos = 1'000'000;
  cfg.alpha = 1.62;
  cfg.seed = 5;
  const auto cat = generate_catalog(cfg);
  std::vector<double> counts;
  counts.reserve(cat.size());
  for (const auto& v : cat.records()) counts.push_back(v.play_count);
  const auto fit = pareto_fit(counts);
  detail = fmt("alpha_hat %.4f (ccdf slope %.3f)", fit.alpha_hat, fit.ccdf_slope);
  return fit.alpha_hat >= 1.52 && fit.alpha_hat <= 1.72;
}

bool latency(std::string& detail) {
  BenchConfig cfg;  // 10^6 requests
  const auto lru = bench_policy(PolicyKind::lru, cfg);
  const auto llf = bench_policy(PolicyKind::llf, cfg);
  const double ratio = llf.median_ns / std::max(lru.median_ns, 1.0);
  BenchConfig small = cfg;
  small.requests = 200'000;
  const auto scaling = bench_scaling(PolicyKind::llf, {1'000, 10'000, 100'000}, small);
  detail = fmt("median llf %.0f ns, lru %.0f ns, ratio %.2f; p99 llf %.0f ns; "
               "log-log slope of llf median vs cache objects %.3f",
               llf.median_ns, lru.median_ns, ratio, llf.p99_ns, scaling.exponent);
  return ratio <= 5.0;
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict |= std::strcmp(argv[i], "--strict") == 0;

  criterion("oracle-equivalence", oracle_equivalence);
  criterion("belady-optimality", belady);
  criterion("conservation", conservation);
  criterion("lru-degeneracy", degeneracy);

  const auto t0 = std::chrono::steady_clock::now();
  const Desk desk = make_desk();
  std::printf("desk corpus: %zu videos, %zu users, %.1fs\n", desk.corpus.catalog.size(),
              desk.corpus.users_for(1.0).size(),
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  Table table;

  DisplacementHistogram simulated;
  try {
    ExperimentSpec s = silc_only(desk.base);
    CellSpec cell{1.0, PolicyKind::llf, 1'000'000'000, kManifestLength, true};
    simulated = run_cell(desk.corpus.catalog, desk.corpus.users_for(1.0), s, cell).simulation.displacement;
  } catch (const std::exception& e) {
    std::printf("simulated displacement unavailable: %s\n", e.what());
  }
  criterion("reorder-invariants", [&](std::string& d) { return reorder_invariants(d, simulated); });
  criterion("beta-trend", [&](std::string& d) { return beta_trend(d, desk, table); });

  const double conv_gb =
      static_cast<double>(convergence_bytes(desk, desk.base.cluster.n_servers)) / kBytesPerGB;
  std::vector<double> sizes = {0.5, 1, 2, 5, 10, 20, 50};
  sizes.erase(std::remove_if(sizes.begin(), sizes.end(), [&](double g) { return g >= conv_gb; }),
              sizes.end());
  sizes.push_back(conv_gb);
  criterion("cache-size-convergence",
            [&](std::string& d) { return cache_convergence(d, desk, table, sizes, conv_gb); });
  criterion("silc-nr-ablation", [&](std::string& d) { return ablation(d, desk, table); });
  criterion("topk-baseline", [&](std::string& d) { return topk(d, table, {1, 2, 5, 10}); });

  criterion("overlap-vs-alpha", overlap_alpha);
  criterion("pareto-fit", pareto);
  criterion("latency", latency);

  std::printf("%d/%d criteria passed\n", g_total - g_failed, g_total);
  return strict && g_failed ? 1 : 0;
}
