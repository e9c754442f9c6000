#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "silc/error.hpp"
#include "silc/policies.hpp"
#include "support.hpp"

using namespace silc;
using test::unit_video;

namespace {

std::vector<VideoId> run(Cache& c, std::initializer_list<VideoId> trace) {
  std::vector<VideoId> evicted;
  for (auto v : trace) {
    auto out = c.serve(0, unit_video(v));
    evicted.insert(evicted.end(), out.evicted.begin(), out.evicted.end());
  }
  return evicted;
}

}  // namespace

TEST_SUITE("policies") {
  TEST_CASE("names round-trip and unknown names are rejected") {
    for (auto p : kAllPolicies) CHECK(parse_policy(policy_name(p)) == p);
    CHECK_THROWS_AS(parse_policy("LRU"), ConfigError);
    CHECK_THROWS_AS(parse_policy("arc"), ConfigError);
  }

  TEST_CASE("zero capacity is a config error") {
    CacheConfig c;
    c.capacity_bytes = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("lru evicts least recently used") {
    LruCache c(2);
    CHECK(run(c, {1, 2, 1, 3}) == std::vector<VideoId>{2});
    CHECK(c.contains(1));
    CHECK(c.contains(3));
  }

  TEST_CASE("fifo ignores hits") {
    FifoCache c(2);
    CHECK(run(c, {1, 2, 1, 3}) == std::vector<VideoId>{1});
  }

  TEST_CASE("lfu evicts fewest hits, recency breaks ties") {
    FrequencyCache c(2, FrequencyCache::Variant::lfu);
    CHECK(run(c, {1, 1, 2, 3}) == std::vector<VideoId>{2});
    CHECK(run(c, {4}) == std::vector<VideoId>{3});
  }

  TEST_CASE("gdsf evicts smallest H = L + freq / size") {
    FrequencyCache c(2, FrequencyCache::Variant::gdsf);
    c.serve(0, unit_video(1));
    c.serve(0, unit_video(2));
    c.serve(0, unit_video(1));  // A: freq 2, B: freq 1
    CHECK(c.key_of(1) == doctest::Approx(2.0));
    CHECK(c.key_of(2) == doctest::Approx(1.0));
    auto out = c.serve(0, unit_video(3));
    CHECK(out.evicted == std::vector<VideoId>{2});
    CHECK(c.aging() == doctest::Approx(1.0));
    CHECK(c.key_of(3) == doctest::Approx(2.0));
  }

  TEST_CASE("gdsf prefers evicting large objects at equal frequency") {
    FrequencyCache c(10, FrequencyCache::Variant::gdsf);
    c.serve(0, unit_video(1, 5));
    c.serve(0, unit_video(2, 1));
    auto out = c.serve(0, unit_video(3, 5));
    CHECK(out.evicted == std::vector<VideoId>{1});
  }

  TEST_CASE("lfuda ages new entries by the last evicted key") {
    FrequencyCache c(2, FrequencyCache::Variant::lfuda);
    run(c, {1, 1, 1, 2, 3});  // 2 evicted with key 1
    CHECK(c.aging() == doctest::Approx(1.0));
    CHECK(c.key_of(3) == doctest::Approx(2.0));
  }

  TEST_CASE("random is deterministic per seed and respects capacity") {
    auto trace = [](std::uint64_t seed) {
      RandomCache c(3, seed);
      std::vector<VideoId> ev;
      for (VideoId v = 1; v < 40; ++v) {
        auto out = c.serve(0, unit_video(1 + v * 7 % 11));
        ev.insert(ev.end(), out.evicted.begin(), out.evicted.end());
        REQUIRE(c.used_bytes() <= 3);
      }
      return ev;
    };
    CHECK(trace(1) == trace(1));
    CHECK(trace(1) != trace(2));
  }

  TEST_CASE("lecar uses its defaults and keeps weights in range") {
    LecarCache::Options o;
    o.capacity_objects = 4;
    LecarCache c(4, o);
    CHECK(c.lru_weight() == doctest::Approx(0.5));
    CHECK(std::pow(c.discount(), 4.0) == doctest::Approx(0.005));
    CounterRng rng(2);
    for (int i = 0; i < 5000; ++i) {
      c.serve(0, unit_video(1 + rng.below(12)));
      REQUIRE(c.object_count() <= 4);
      REQUIRE(c.lru_weight() >= 0.01);
      REQUIRE(c.lru_weight() <= 0.99);
    }
    c.check_invariants();
  }

  TEST_CASE("lecar learns LFU on a frequency-friendly trace") {
    // Two warmed-up hot videos plus a scan of three cold ones per round: the
    // scan pushes the hot pair out under LRU, so LRU keeps getting blamed.
    LecarCache::Options o;
    o.capacity_objects = 4;
    LecarCache c(4, o);
    for (int i = 0; i < 10; ++i) {
      c.serve(0, unit_video(1));
      c.serve(0, unit_video(2));
    }
    VideoId cold = 100;
    for (int i = 0; i < 3000; ++i) {
      c.serve(0, unit_video(1));
      c.serve(0, unit_video(2));
      for (int k = 0; k < 3; ++k) c.serve(0, unit_video(cold++));
    }
    CHECK(c.lru_weight() < 0.5);
  }

  TEST_CASE("topk preloads greedily and never admits") {
    std::vector<VideoRecord> popular = {unit_video(1, 4), unit_video(2, 3), unit_video(3, 2),
                                        unit_video(4, 1)};
    TopKCache c(7, popular);
    CHECK(c.contains(1));
    CHECK(c.contains(2));
    CHECK_FALSE(c.contains(3));  // 4 + 3 + 2 > 7
    CHECK_FALSE(c.contains(4));  // 7 + 1 > 7
    auto out = c.serve(0, unit_video(9));
    CHECK_FALSE(out.hit);
    CHECK_FALSE(c.contains(9));
    CHECK(c.serve(0, unit_video(1)).hit);
  }

  TEST_CASE("fif evicts the furthest next use") {
    FifCache c(2);
    c.register_manifest(1, std::vector<PendingEntry>{{1, 0}, {2, 1}, {3, 2}, {1, 3}, {2, 4}, {1, 5}});
    c.serve(1, unit_video(1));
    c.serve(1, unit_video(2));
    auto out = c.serve(1, unit_video(3));  // next uses: 1 -> 0, 2 -> 1, 3 -> never
    CHECK(out.evicted == std::vector<VideoId>{3});
  }

  TEST_CASE("fif treats videos absent from lookahead as furthest, LRU among them") {
    FifCache c(2);
    c.serve(1, unit_video(1));
    c.serve(1, unit_video(2));
    auto out = c.serve(1, unit_video(3));
    CHECK(out.evicted == std::vector<VideoId>{1});
  }

  TEST_CASE("fif with full lookahead matches brute force on random traces") {
    CounterRng rng(9);
    for (int t = 0; t < 2000; ++t) {
      const int len = 1 + static_cast<int>(rng.below(8));
      const int slots = 1 + static_cast<int>(rng.below(3));
      std::vector<int> trace;
      std::vector<PendingEntry> es;
      for (int i = 0; i < len; ++i) {
        trace.push_back(static_cast<int>(rng.below(4)));
        es.push_back({static_cast<VideoId>(trace.back() + 1), i});
      }
      FifCache c(static_cast<std::uint64_t>(slots));
      c.register_manifest(1, es);
      int misses = 0;
      for (int x : trace) misses += !c.serve(1, unit_video(x + 1)).hit;
      REQUIRE(misses == oracle::min_misses(trace, slots));
    }
  }

  TEST_CASE("every policy keeps used bytes within capacity under random sizes") {
    std::vector<VideoRecord> popular;
    for (VideoId v = 1; v <= 30; ++v) popular.push_back(unit_video(v, 1 + v % 7));
    for (auto p : kAllPolicies) {
      CAPTURE(policy_name(p));
      auto c = test::cache_of(p, 20, popular);
      CounterRng rng(4);
      std::int64_t pos = 0;
      for (int i = 0; i < 3000; ++i) {
        const VideoId v = 1 + rng.below(30);
        const auto user = static_cast<UserId>(rng.below(4));
        if (i % 5 == 0)
          c->register_manifest(user, std::vector<PendingEntry>{{v, pos++}, {1 + (v * 3) % 30, pos++}});
        if (i % 97 == 0) c->release_user(user);
        auto out = c->serve(user, unit_video(v, 1 + v % 7));
        REQUIRE(c->used_bytes() <= 20);
        REQUIRE(out.bytes_served == 1 + v % 7);
        REQUIRE((out.hit ? out.bytes_fetched_midgress == 0 : out.bytes_fetched_midgress == out.bytes_served));
      }
      c->check_invariants();
    }
  }
}
