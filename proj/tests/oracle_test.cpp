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

#include "socialfed/oracle.hpp"

#include <gtest/gtest.h>

#include <set>

#include "socialfed/errors.hpp"
#include "socialfed/matching_engine.hpp"
#include "support.hpp"

namespace socialfed {
namespace {

using testing::naive_deviation;
using testing::random_trust;
using testing::uniform_trust;

TEST(Enumeration, SmallCounts) {
  EXPECT_EQ(count_partitions(0), 1u);
  EXPECT_EQ(count_partitions(1), 1u);
  EXPECT_EQ(count_partitions(3), 5u);
  EXPECT_EQ(count_partitions(4), 15u);
}

TEST(Enumeration, MatchesBellTriangle) {
  const std::uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  for (std::size_t n = 0; n <= 10; ++n) {
    EXPECT_EQ(bell_number(n), bell[n]);
    EXPECT_EQ(count_partitions(n), bell[n]);
  }
}

TEST(Enumeration, EachPartitionOnceAndValid) {
  SetPartitionEnumerator e(5);
  std::set<std::vector<std::uint8_t>> seen;
  do {
    const auto labels = e.labels();
    seen.emplace(labels.begin(), labels.end());
    const auto blocks = e.blocks();
    EXPECT_NO_THROW(Partition::from_clusters(5, blocks));
  } while (e.next());
  EXPECT_EQ(seen.size(), 52u);
}

TEST(Enumeration, SizeGuard) {
  EXPECT_THROW(SetPartitionEnumerator(13), SizeGuard);
  EXPECT_NO_THROW(SetPartitionEnumerator(12));
  EXPECT_THROW(optimal_partition(TrustTable(13), GameParams{}), SizeGuard);
}

TEST(OptimalPartition, SingleUser) {
  const GameParams p;
  const OptimalPartition best = optimal_partition(TrustTable(1), p);
  EXPECT_EQ(best.partition.n_clusters(), 1u);
  EXPECT_NEAR(best.total_utility, p.singleton_value(), 1e-12);
}

TEST(OptimalPartition, TrustedPairMerges) {
  const GameParams p;
  const TrustTable t = uniform_trust(2, 0.5, 0.8);
  const double pair = build_cluster(t, p, {0, 1}).utility;
  ASSERT_GT(pair, 2 * p.singleton_value() + p.head_bonus);
  const OptimalPartition best = optimal_partition(t, p);
  EXPECT_EQ(best.partition, Partition::grand(2));
  EXPECT_NEAR(best.total_utility, pair, 1e-12);
}

TEST(OptimalPartition, StrangersPairUp) {
  // A head trains on raw data, so each stranger pair gains; a third member
  // adds less than it would alone.
  const GameParams p;
  const double pair = build_cluster(TrustTable(2), p, {0, 1}).utility;
  ASSERT_GT(pair, 2 * p.singleton_value());
  ASSERT_LT(build_cluster(TrustTable(3), p, {0, 1, 2}).utility,
            pair + p.singleton_value());
  for (std::size_t n = 1; n <= 7; ++n) {
    const OptimalPartition best = optimal_partition(TrustTable(n), p);
    EXPECT_NEAR(best.total_utility,
                static_cast<double>(n / 2) * pair +
                    static_cast<double>(n % 2) * p.singleton_value(),
                1e-9);
    EXPECT_EQ(best.partition.n_clusters(), n - n / 2);
  }
}

TEST(NashStable, StrangersSingletonsStable) {
  for (std::size_t n = 1; n <= 6; ++n) {
    EXPECT_TRUE(is_nash_stable(TrustTable(n), GameParams{},
                               Partition::singletons(n))
                    .stable);
  }
}

TEST(NashStable, WitnessOnHandBuiltFixture) {
  // Everyone trusts everyone. Member 1 of {0,1} would rather head {1,2}, and
  // users are scanned in id order, so 1 is the witness.
  const TrustTable t = uniform_trust(3, 0.5, 0.9);
  const Partition part = Partition::from_clusters(3, {{0, 1}, {2}});
  const StabilityReport r = is_nash_stable(t, GameParams{}, part);
  ASSERT_FALSE(r.stable);
  EXPECT_EQ(r.user, std::optional<UserId>(1));
  EXPECT_EQ(r.target, std::optional<std::size_t>(part.cluster_of(2)));
  EXPECT_GT(r.deviation, r.current);
  const auto slow = naive_deviation(t, GameParams{}, part);
  ASSERT_TRUE(slow);
  EXPECT_EQ(slow->user, 1u);
}

TEST(NashStable, AgreesWithNaiveScan) {
  const GameParams p;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const TrustTable t = random_trust(seed, n);
    SetPartitionEnumerator e(n);
    do {
      const Partition part = Partition::from_clusters(n, e.blocks());
      const bool fast = is_nash_stable(t, p, part).stable;
      const bool slow = !naive_deviation(t, p, part).has_value();
      ASSERT_EQ(fast, slow) << "seed " << seed;
    } while (e.next());
  }
}

TEST(OptimalPartition, NoWorseThanEngine) {
  const GameParams p;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 3 + seed % 5;
    const TrustTable t = random_trust(seed + 300, n);
    const RunResult r = run_to_stable(t, p, Partition::singletons(n));
    EXPECT_GE(optimal_partition(t, p).total_utility,
              total_utility(r.clusters) - 1e-9);
  }
}

TEST(GrandCoalition, TrustedPairHolds) {
  const GrandCoalitionReport r =
      grand_coalition_unstable(uniform_trust(2, 0.5, 0.9), GameParams{});
  EXPECT_FALSE(r.unstable);
}

TEST(GrandCoalition, StrangersBreakUp) {
  const GrandCoalitionReport r = grand_coalition_unstable(TrustTable(2), GameParams{});
  EXPECT_TRUE(r.unstable);
  ASSERT_TRUE(r.witness);
  EXPECT_LT(r.payoff_in_grand, r.singleton_value);
  EXPECT_THROW(grand_coalition_unstable(TrustTable(1), GameParams{}),
               InvalidArgument);
}

}  // namespace
}  // namespace socialfed
