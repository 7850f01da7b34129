// Copyright 2026 The socialfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socialfed/matching_engine.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "socialfed/errors.hpp"
#include "socialfed/oracle.hpp"
#include "support.hpp"

namespace socialfed {
namespace {

using testing::random_trust;
using testing::uniform_trust;

constexpr double kSingletonValue = 32.3365515058190948;

TEST(InitPartition, Singletons) {
  const TrustTable t(5);
  const GameParams p;
  const Partition part = init_partition(InitMode::kSingletons, t);
  EXPECT_EQ(part.n_clusters(), 5u);
  for (const Cluster& c : evaluate_partition(t, p, part)) {
    EXPECT_NEAR(c.utility, kSingletonValue, 1e-12);
    EXPECT_EQ(c.sigmas[0], p.privacy.sigma_max);
  }
}

TEST(InitPartition, WarmStartRoundTrip) {
  const TrustTable t = random_trust(4, 7);
  const GameParams p;
  const RunResult first = run_to_stable(t, p, Partition::singletons(7));
  ASSERT_TRUE(first.converged);
  const auto path = std::filesystem::temp_directory_path() / "sf_warm.json";
  {
    std::ofstream out(path);
    out << partition_to_json(first.clusters, first.iterations, true).dump();
  }
  const Partition loaded = init_partition(InitMode::kWarmStart, t, path.string());
  EXPECT_EQ(loaded, first.partition);
  const RunResult again = run_to_stable(t, p, loaded);
  EXPECT_TRUE(again.converged);
  EXPECT_EQ(again.iterations, 1u);
  EXPECT_EQ(again.metrics.back().n_transfers, 0u);
  EXPECT_EQ(again.partition, first.partition);
  std::filesystem::remove(path);
}

TEST(InitPartition, WarmStartRejectsOverlap) {
  const nlohmann::json doc = nlohmann::json::parse(
      R"({"clusters":[{"head":0,"members":[0,1]},{"head":1,"members":[1,2]}]})");
  EXPECT_THROW(partition_from_json(doc, 3), LoadError);
  const nlohmann::json bad_head = nlohmann::json::parse(
      R"({"clusters":[{"head":2,"members":[0,1]},{"head":2,"members":[2]}]})");
  EXPECT_THROW(partition_from_json(bad_head, 3), LoadError);
  EXPECT_THROW(init_partition(InitMode::kWarmStart, TrustTable(2), "/nonexistent"),
               LoadError);
}

TEST(Step, StablePartitionMovesNobody) {
  const TrustTable t(4);
  const GameParams p;
  EngineState s = make_state(t, p, Partition::singletons(4));
  const StepOutcome out = step(s, t, p);
  EXPECT_EQ(out.transfers, 0u);
  EXPECT_EQ(out.requests, 0u);
  EXPECT_EQ(s.partition, Partition::singletons(4));
}

TEST(Step, TwoRequestsOneAdmission) {
  // 1 and 2 both want to join 0; 0 admits the higher payoff (user 1: higher
  // trust to the head) and 2's history records {0}.
  TrustTable t = uniform_trust(3, 0.5, 0.9);
  t.set_closeness(1, 2, 0.0);
  t.set_closeness(2, 1, 0.0);
  t.set_alpha(1, 2, 0.0);
  t.set_alpha(2, 1, 0.0);
  t.set_alpha(2, 0, 0.5);
  const GameParams p;
  EngineState s = make_state(t, p, Partition::from_clusters(3, {{0}, {1}, {2}}));
  const StepOutcome out = step(s, t, p);
  EXPECT_EQ(out.transfers, 1u);
  EXPECT_EQ(s.partition.cluster(s.partition.cluster_of(0)),
            (std::vector<UserId>{0, 1}));
  EXPECT_TRUE(s.histories[2].contains(std::vector<UserId>{0}));
  // 0 asked to join {1}, which lost its member and admits nobody.
  EXPECT_TRUE(s.histories[0].contains(std::vector<UserId>{1}));
  EXPECT_TRUE(out.rule_violations.empty());
}

TEST(Step, NoClusterGainsAndLosesInOneIteration) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const TrustTable t = random_trust(seed, 8, 0.6);
    const GameParams p;
    EngineState s = make_state(t, p, Partition::singletons(8));
    for (int i = 0; i < 50; ++i) {
      const StepOutcome out = step(s, t, p);
      EXPECT_TRUE(out.rule_violations.empty()) << "seed " << seed;
      if (out.transfers == 0) break;
    }
  }
}

TEST(RunToStable, SingleUser) {
  const RunResult r = run_to_stable(TrustTable(1), GameParams{}, Partition::singletons(1));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.partition.n_clusters(), 1u);
  EXPECT_EQ(r.iterations, 1u);
}

TEST(RunToStable, MaxIterFlagged) {
  const TrustTable t = uniform_trust(6, 0.5, 0.9);
  EngineOptions o;
  o.max_iter = 1;
  const RunResult r = run_to_stable(t, GameParams{}, Partition::singletons(6), o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  o.max_iter = 0;
  EXPECT_THROW(run_to_stable(t, GameParams{}, Partition::singletons(6), o),
               InvalidArgument);
}

TEST(RunToStable, ConvergedPartitionsAreStableAndRational) {
  const GameParams p;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const TrustTable t = random_trust(seed + 1000, n);
    EngineOptions o;
    o.max_iter = bell_number(n) * n;
    const RunResult r = run_to_stable(t, p, Partition::singletons(n), o);
    ASSERT_TRUE(r.converged) << "seed " << seed;
    EXPECT_TRUE(is_nash_stable(t, p, r.partition, r.histories).stable);
    for (double psi : r.payoffs) EXPECT_GE(psi, kSingletonValue - 1e-9);
  }
}

TEST(RunToStable, Deterministic) {
  const TrustTable t = random_trust(77, 8);
  const RunResult a = run_to_stable(t, GameParams{}, Partition::singletons(8));
  const RunResult b = run_to_stable(t, GameParams{}, Partition::singletons(8));
  std::ostringstream ma;
  std::ostringstream mb;
  write_metrics_csv(ma, a.metrics);
  write_metrics_csv(mb, b.metrics);
  EXPECT_EQ(ma.str(), mb.str());
  EXPECT_EQ(partition_to_json(a.clusters, a.iterations, a.converged).dump(),
            partition_to_json(b.clusters, b.iterations, b.converged).dump());
}

TEST(CommCost, MessageModel) {
  EXPECT_EQ(comm_cost(0, 64), 0u);
  EXPECT_EQ(comm_cost(5, 64), 640u);
  const TrustTable t = random_trust(5, 8, 0.7);
  EngineOptions o;
  o.message_bytes = 32;
  const RunResult r = run_to_stable(t, GameParams{}, Partition::singletons(8), o);
  for (const auto& m : r.metrics) EXPECT_EQ(m.comm_cost_bytes, 64 * m.n_requests);
  EXPECT_EQ(r.metrics.back().comm_cost_bytes, 0u);
}

TEST(Metrics, CsvHeaderAndSizes) {
  const TrustTable t = random_trust(9, 6);
  const RunResult r = run_to_stable(t, GameParams{}, Partition::singletons(6));
  std::ostringstream out;
  write_metrics_csv(out, r.metrics);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "iteration,n_clusters,avg_cluster_size,avg_payoff,n_transfers,"
            "comm_cost_bytes");
  EXPECT_EQ(r.metrics.front().iteration, 0u);
  for (const auto& m : r.metrics) {
    EXPECT_GE(m.n_clusters, 1u);
    EXPECT_NEAR(m.avg_cluster_size * m.n_clusters, 6.0, 1e-12);
  }
}

TEST(PartitionJson, Shape) {
  const TrustTable t = uniform_trust(2, 0.5, 0.9);
  const auto clusters = evaluate_partition(t, GameParams{}, Partition::grand(2));
  const nlohmann::json doc = partition_to_json(clusters, 3, true);
  EXPECT_EQ(doc["iteration"], 3);
  EXPECT_EQ(doc["converged"], true);
  EXPECT_EQ(doc["clusters"][0]["head"], 0);
  EXPECT_EQ(doc["clusters"][0]["members"].size(), 2u);
  EXPECT_EQ(doc["clusters"][0]["sigmas"][1], 0.0);
  EXPECT_EQ(partition_from_json(doc, 2), Partition::grand(2));
}

}  // namespace
}  // namespace socialfed
