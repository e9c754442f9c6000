#include "silc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "silc/error.hpp"
#include "silc/lookahead.hpp"

namespace silc {

void ClusterConfig::validate(std::size_t manifest_len) const {
  if (n_servers < 1) throw ConfigError("n_servers", "must be at least 1");
  if (per_server_capacity_bytes == 0)
    throw ConfigError("per_server_capacity_bytes", "must be positive");
  if (max_clients < 1) throw ConfigError("max_clients", "must be at least 1");
  if (max_clients < initial_clients)
    throw ConfigError("max_clients", "must be >= initial_clients");
  if (client_add_interval_ms <= 0)
    throw ConfigError("client_add_interval", "must be positive");
  if (refill_threshold >= manifest_len)
    throw ConfigError("refill_threshold", "must be below the manifest length (" +
                                              std::to_string(manifest_len) + ")");
  if (!(duration_scale > 0)) throw ConfigError("duration_scale", "must be positive");
}

std::vector<UserWorkload> build_workload(std::span<const EmulatedUser> users,
                                         std::size_t manifest_len) {
  std::vector<UserWorkload> out;
  out.reserve(users.size());
  for (const auto& u : users) out.push_back({u.user_id, build_manifests(u, manifest_len)});
  return out;
}

namespace {

struct Client {
  const UserWorkload* work = nullptr;
  std::size_t manifest_limit = 0;
  std::size_t next_manifest = 0;
  std::deque<VideoId> outstanding;
  std::int64_t position = 0;
};

enum class Action : std::uint8_t { arrival, request, departure };

struct Event {
  std::int64_t time;
  std::uint64_t seq;
  Action action;
  std::uint32_t client;

  bool operator>(const Event& o) const {
    return std::tie(time, seq) > std::tie(o.time, o.seq);
  }
};

class Simulator {
 public:
  Simulator(const Catalog& catalog, std::span<const UserWorkload> users,
            const ClusterConfig& cfg, const CacheConfig& cache_cfg)
      : catalog_(catalog), users_(users), cfg_(cfg) {
    std::size_t max_len = 1;
    for (const auto& u : users)
      for (const auto& m : u.manifests) max_len = std::max(max_len, m.entries.size());
    cfg.validate(max_len);

    std::vector<std::vector<VideoRecord>> popular(cfg.n_servers);
    if (cache_cfg.policy == PolicyKind::topk) {
      std::vector<VideoRecord> all(catalog.records().begin(), catalog.records().end());
      std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.play_count > b.play_count;
      });
      for (const auto& v : all) popular[server_of(v.video_id)].push_back(v);
    }
    for (std::uint32_t s = 0; s < cfg.n_servers; ++s)
      caches_.push_back(make_cache(cache_cfg, popular[s]));
    if (cfg.reorder_enabled && !caches_.front()->tracks_lookahead())
      shadow_.resize(cfg.n_servers);

    order_.resize(users.size());
    std::iota(order_.begin(), order_.end(), 0);
    auto rng = CounterRng::stream(cfg.seed, 0xC11E);
    for (std::size_t i = order_.size(); i > 1; --i)
      std::swap(order_[i - 1], order_[rng.below(i)]);
    clients_.resize(users.size());
  }

  SimulationResult run() {
    const std::size_t initial = std::min(cfg_.initial_clients, users_.size());
    for (std::size_t i = 0; i < initial; ++i) start_next(0);
    if (next_user_ < users_.size()) push(cfg_.client_add_interval_ms, Action::arrival, 0);

    while (!queue_.empty()) {
      const Event e = queue_.top();
      queue_.pop();
      switch (e.action) {
        case Action::arrival:
          if (active_ < cfg_.max_clients && next_user_ < users_.size()) start_next(e.time);
          if (active_ < cfg_.max_clients && next_user_ < users_.size())
            push(e.time + cfg_.client_add_interval_ms, Action::arrival, 0);
          break;
        case Action::request:
          request(e.client, e.time);
          break;
        case Action::departure:
          depart(e.client, e.time);
          break;
      }
    }
    for (const auto& c : caches_) c->check_invariants();
    for (const auto& c : caches_) result_.server_used_bytes.push_back(c->used_bytes());
    return std::move(result_);
  }

 private:
  std::uint32_t server_of(VideoId v) {
    auto [it, fresh] = shard_memo_.try_emplace(v, 0);
    if (fresh) it->second = shard(v, cfg_.n_servers);
    return it->second;
  }

  void push(std::int64_t time, Action action, std::uint32_t client) {
    queue_.push({time, seq_++, action, client});
  }

  void start_next(std::int64_t time) {
    const std::uint32_t c = order_[next_user_++];
    Client& client = clients_[c];
    client.work = &users_[c];
    client.manifest_limit = cfg_.manifests_per_user == 0
                                ? client.work->manifests.size()
                                : std::min(cfg_.manifests_per_user, client.work->manifests.size());
    ++active_;
    result_.peak_clients = std::max(result_.peak_clients, active_);
    if (client.manifest_limit == 0) {
      push(time, Action::departure, c);
      return;
    }
    load_manifest(client, time);
    push(time, Action::request, c);
  }

  std::int64_t frequency(std::uint32_t s, VideoId v) const {
    return shadow_.empty() ? caches_[s]->lookahead_frequency(v) : shadow_[s].count(v);
  }

  void load_manifest(Client& client, std::int64_t time) {
    const ManifestFile& m = client.work->manifests[client.next_manifest++];
    const UserId user = client.work->user_id;
    result_.trace.push_back({time, user, EventKind::manifest, 0, 0, false, false, 0, m.sequence_no});

    std::vector<VideoId> entries = m.entries;
    if (cfg_.reorder_enabled) {
      std::unordered_map<VideoId, std::int64_t> own;
      for (auto v : entries) ++own[v];
      auto decision = reorder_manifest(
          entries, [&](VideoId v) { return caches_[server_of(v)]->contains(v); },
          [&](VideoId v) { return frequency(server_of(v), v) + own[v]; });
      accumulate_displacement(result_.displacement, decision);
      ++result_.reordered_manifests;
      entries = std::move(decision.reordered);
    }

    std::vector<std::vector<PendingEntry>> per_server(cfg_.n_servers);
    for (auto v : entries) {
      per_server[server_of(v)].push_back({v, client.position++});
      client.outstanding.push_back(v);
    }
    for (std::uint32_t s = 0; s < cfg_.n_servers; ++s) {
      if (per_server[s].empty()) continue;
      caches_[s]->register_manifest(user, per_server[s]);
      if (!shadow_.empty())
        for (const auto& e : per_server[s]) shadow_[s].add(user, e);
    }
  }

  void request(std::uint32_t c, std::int64_t time) {
    Client& client = clients_[c];
    const UserId user = client.work->user_id;
    const VideoId v = client.outstanding.front();
    client.outstanding.pop_front();
    const VideoRecord& rec = catalog_.at(v);
    const std::uint32_t s = server_of(v);

    const AccessOutcome out = caches_[s]->serve(user, rec);
    if (!shadow_.empty()) shadow_[s].consume(user, v);
    if (!out.registered && caches_[s]->tracks_lookahead()) ++result_.unregistered_requests;
    result_.trace.push_back({time, user, EventKind::video, v, s, out.hit, out.bypass,
                             rec.size_bytes, 0});
    if (caches_[s]->used_bytes() > caches_[s]->capacity_bytes())
      throw InvariantViolation("server " + std::to_string(s) + " exceeded capacity");
    if (cfg_.check_every != 0 && ++served_ % cfg_.check_every == 0)
      for (const auto& cache : caches_) cache->check_invariants();

    const bool more = client.next_manifest < client.manifest_limit;
    if (more && (client.outstanding.size() == cfg_.refill_threshold || client.outstanding.empty()))
      load_manifest(client, time);

    const auto watch = static_cast<std::int64_t>(
        std::llround(static_cast<double>(rec.duration_ms) * cfg_.duration_scale));
    push(time + watch, client.outstanding.empty() ? Action::departure : Action::request, c);
  }

  void depart(std::uint32_t c, std::int64_t time) {
    const UserId user = clients_[c].work->user_id;
    for (auto& cache : caches_) cache->release_user(user);
    for (auto& book : shadow_) book.release(user, [](VideoId) {});
    clients_[c] = Client{};
    --active_;
    if (next_user_ < users_.size()) start_next(time);
  }

  const Catalog& catalog_;
  std::span<const UserWorkload> users_;
  const ClusterConfig& cfg_;
  std::vector<std::unique_ptr<Cache>> caches_;
  std::vector<LookaheadBook> shadow_;
  std::unordered_map<VideoId, std::uint32_t> shard_memo_;
  std::vector<std::uint32_t> order_;
  std::vector<Client> clients_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  std::size_t next_user_ = 0;
  std::size_t active_ = 0;
  std::size_t served_ = 0;
  SimulationResult result_;
};

}  // namespace

SimulationResult run_simulation(const Catalog& catalog, std::span<const UserWorkload> users,
                                const ClusterConfig& cluster, const CacheConfig& cache) {
  if (users.empty()) throw std::invalid_argument("run_simulation: no users");
  Simulator sim(catalog, users, cluster, cache);
  return sim.run();
}

namespace {

template <class Sequences>
double floor_of(const Catalog& catalog, const Sequences& each_video) {
  std::unordered_set<VideoId> seen;
  double distinct = 0;
  double total = 0;
  each_video([&](VideoId v) {
    const auto size = static_cast<double>(catalog.at(v).size_bytes);
    total += size;
    if (seen.insert(v).second) distinct += size;
  });
  return total > 0 ? distinct / total : 0.0;
}

}  // namespace

double compulsory_floor(const Catalog& catalog, std::span<const UserWorkload> users) {
  return floor_of(catalog, [&](auto&& fn) {
    for (const auto& u : users)
      for (const auto& m : u.manifests)
        for (auto v : m.entries) fn(v);
  });
}

double compulsory_floor(const Catalog& catalog, std::span<const EmulatedUser> users) {
  return floor_of(catalog, [&](auto&& fn) {
    for (const auto& u : users)
      for (auto v : u.video_sequence) fn(v);
  });
}

void write_trace(std::ostream& out, std::span<const RequestEvent> trace) {
  using nlohmann::json;
  for (const auto& e : trace) {
    json j;
    j["tick"] = e.tick_ms;
    j["user"] = e.user;
    if (e.kind == EventKind::video) {
      j["kind"] = "video";
      j["video"] = e.video;
      j["server"] = e.server;
      j["hit"] = e.hit;
      j["bypass"] = e.bypass;
    } else {
      j["kind"] = "manifest";
      j["video"] = nullptr;
      j["server"] = nullptr;
      j["hit"] = nullptr;
      j["seq"] = e.sequence_no;
    }
    j["bytes"] = e.bytes;
    out << j.dump() << '\n';
  }
}

std::vector<RequestEvent> read_trace(std::istream& in) {
  using nlohmann::json;
  std::vector<RequestEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    RequestEvent e;
    e.tick_ms = j.at("tick").get<std::int64_t>();
    e.user = j.at("user").get<UserId>();
    e.bytes = j.at("bytes").get<std::uint64_t>();
    if (j.at("kind") == "video") {
      e.kind = EventKind::video;
      e.video = j.at("video").get<VideoId>();
      e.server = j.at("server").get<std::uint32_t>();
      e.hit = j.at("hit").get<bool>();
      e.bypass = j.value("bypass", false);
    } else {
      e.kind = EventKind::manifest;
      e.sequence_no = j.at("seq").get<std::uint32_t>();
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace silc
