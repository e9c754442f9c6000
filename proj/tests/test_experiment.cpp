#include <doctest.h>

#include <set>
#include <sstream>

#include "silc/error.hpp"
#include "silc/experiment.hpp"

using namespace silc;

namespace {

Corpus tiny_corpus() {
  CorpusConfig cfg;
  cfg.catalog.n_videos = 800;
  cfg.n_participants = 20;
  cfg.days = 8;
  cfg.daily_views = 60;
  cfg.users.n_users = 60;
  cfg.users.batch_size = 20;
  cfg.betas = {0.0, 1.0};
  return generate_corpus(cfg);
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("labels") {
    CHECK(policy_label(PolicyKind::llf, true) == "silc");
    CHECK(policy_label(PolicyKind::llf, false) == "silc_nr");
    CHECK(policy_label(PolicyKind::lru, false) == "lru");
    CHECK(policy_label(PolicyKind::lru, true) == "lru+reorder");
    CHECK(beta_label(0.8) == "0.8");
    CHECK(beta_label(1.0) == "1");
  }

  TEST_CASE("grid size is the product of its axes") {
    ExperimentSpec s;
    s.cache_sizes_bytes = {10'000'000'000};
    CHECK(expand_grid(s).size() == 6 * 9 * 2);
    s.reorder = ReorderMode::off;
    CHECK(expand_grid(s).size() == 54);
    s.manifest_lengths = {10, 20, 30};
    CHECK(expand_grid(s).size() == 162);
  }

  TEST_CASE("cluster settings scale with manifest length") {
    ExperimentSpec s;
    CellSpec cell;
    cell.cache_bytes = 100'000'000'000;
    cell.manifest_length = 30;
    auto c = cluster_for(s, cell);
    CHECK(c.refill_threshold == 10);
    CHECK(c.manifests_per_user == 5);
    CHECK(c.per_server_capacity_bytes == 10'000'000'000);
    cell.manifest_length = 10;
    c = cluster_for(s, cell);
    CHECK(c.refill_threshold == 3);
    CHECK(c.manifests_per_user == 15);
    cell.manifest_length = 20;
    c = cluster_for(s, cell);
    CHECK(c.refill_threshold == 7);
    CHECK(c.manifests_per_user == 8);
  }

  TEST_CASE("spec validation") {
    ExperimentSpec s;
    s.cache_sizes_bytes = {1'000'000'001};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = ExperimentSpec{};
    s.policies.clear();
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(experiment_spec_from_json(nlohmann::json{{"polices", {"lru"}}}), ConfigError);
    CHECK_THROWS_AS(experiment_spec_from_json(nlohmann::json{{"policies", {"arc"}}}), ConfigError);
    const auto round = experiment_spec_from_json(to_json(ExperimentSpec{}));
    CHECK(round.cache_sizes_bytes == ExperimentSpec{}.cache_sizes_bytes);
    CHECK(round.policies == ExperimentSpec{}.policies);
  }

  TEST_CASE("llf and lru see the same workload") {
    const auto corpus = tiny_corpus();
    ExperimentSpec s;
    s.betas = {1.0};
    s.cache_sizes_bytes = {2'000'000'000};
    s.policies = {PolicyKind::llf, PolicyKind::lru};
    s.reorder = ReorderMode::off;
    std::stringstream csv;
    const auto rows = run_sweep(corpus, s, &csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].request_count == rows[1].request_count);
    CHECK(rows[0].total_bytes == rows[1].total_bytes);
    CHECK(rows[0].compulsory_floor == rows[1].compulsory_floor);
    const auto back = read_reports(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[0].policy == "silc_nr");
    CHECK(back[1].policy == "lru");
  }

  TEST_CASE("sweep rows come out in grid order regardless of jobs") {
    const auto corpus = tiny_corpus();
    ExperimentSpec s;
    s.betas = {0.0, 1.0};
    s.cache_sizes_bytes = {1'000'000'000, 5'000'000'000};
    s.policies = {PolicyKind::llf, PolicyKind::lru, PolicyKind::topk};
    s.jobs = 1;
    std::stringstream a, b;
    run_sweep(corpus, s, &a);
    s.jobs = 8;
    run_sweep(corpus, s, &b);
    CHECK(a.str() == b.str());
    const auto rows = read_reports(a);
    CHECK(rows.size() == 2 * 2 * 3 * 2);
    for (const auto& r : rows) CHECK(check_report(r).empty());
  }

  TEST_CASE("missing beta in corpus is reported") {
    const auto corpus = tiny_corpus();
    ExperimentSpec s;
    s.betas = {0.4};
    CHECK_THROWS_AS(run_sweep(corpus, s), ConfigError);
  }
}
