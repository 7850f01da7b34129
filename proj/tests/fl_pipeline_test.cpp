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

#include "socialfed/fl_pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "socialfed/errors.hpp"
#include "support.hpp"

namespace socialfed {
namespace {

SyntheticTask small_task(std::uint64_t seed = 1, std::size_t users = 4) {
  TaskSpec spec;
  spec.n_users = users;
  spec.samples_per_class = 20;
  spec.test_samples = 200;
  return make_task(spec, seed);
}

Cluster manual_cluster(std::vector<UserId> members, std::vector<double> q,
                       std::vector<double> sigmas = {}) {
  Cluster c;
  c.members = std::move(members);
  c.head = c.members.front();
  c.qualities = std::move(q);
  c.sigmas = sigmas.empty() ? std::vector<double>(c.members.size(), 0.0)
                            : std::move(sigmas);
  c.alphas.assign(c.members.size(), 1.0);
  return c;
}

TEST(Task, ShapesAndDeterminism) {
  const SyntheticTask a = small_task(3, 6);
  const SyntheticTask b = small_task(3, 6);
  EXPECT_EQ(a.dim, 32u);
  ASSERT_EQ(a.users.size(), 6u);
  std::size_t total = 0;
  for (std::size_t u = 0; u < 6; ++u) {
    EXPECT_GT(a.users[u].rows(), 0u);
    EXPECT_EQ(a.users[u].features.size(), a.users[u].rows() * 32);
    EXPECT_EQ(a.users[u].features, b.users[u].features);
    total += a.users[u].rows();
  }
  EXPECT_GE(total, 200u);
  EXPECT_EQ(a.test.rows(), 200u);
}

TEST(LocalTrain, FixedPointAndZeroRate) {
  TaskSpec spec;
  spec.n_users = 1;
  spec.samples_per_class = 10;
  spec.label_noise = 0.0;
  spec.test_samples = 10;
  const SyntheticTask task = make_task(spec, 2);
  const ModelVector out = local_train(task, 0, task.truth, 0.05, 3, 8, 1);
  for (std::size_t j = 0; j < task.dim; ++j) EXPECT_NEAR(out[j], task.truth[j], 1e-12);
  const ModelVector start(task.dim, 0.3);
  EXPECT_EQ(local_train(task, 0, start, 0.0, 2, 4, 1), start);
}

TEST(LocalTrain, FullBatchStepMatchesClosedForm) {
  const SyntheticTask task = small_task(4);
  const LocalData& d = task.users[1];
  ModelVector w(task.dim, 0.1);
  const double eta = 0.05;
  ModelVector want = w;
  for (std::size_t j = 0; j < task.dim; ++j) {
    double g = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      double r = -d.targets[i];
      for (std::size_t k = 0; k < task.dim; ++k) r += d.features[i * task.dim + k] * w[k];
      g += r * d.features[i * task.dim + j];
    }
    want[j] -= eta * g / static_cast<double>(d.rows());
  }
  const ModelVector got = local_train(task, 1, w, eta, 1, 0, 9);
  for (std::size_t j = 0; j < task.dim; ++j) EXPECT_NEAR(got[j], want[j], 1e-9);
}

TEST(LocalTrain, Errors) {
  SyntheticTask task = small_task();
  EXPECT_THROW(local_train(task, 0, task.truth, -0.1, 1, 1, 0), InvalidArgument);
  EXPECT_THROW(local_train(task, 9, task.truth, 0.1, 1, 1, 0), InvalidArgument);
  task.users[0] = {};
  EXPECT_THROW(local_train(task, 0, task.truth, 0.1, 1, 1, 0), InvalidArgument);
}

TEST(Sanitize, ClippingWithoutNoise) {
  const ModelVector small{0.3, 0.4};
  EXPECT_EQ(sanitize(small, 0.0, 1.0, 5), small);
  const ModelVector big{1.2, 1.6};  // norm 2
  const ModelVector clipped = sanitize(big, 0.0, 1.0, 5);
  EXPECT_NEAR(l2_norm(clipped), 1.0, 1e-15);
  EXPECT_NEAR(clipped[0], 0.6, 1e-15);
  EXPECT_THROW(sanitize(big, -0.1, 1.0, 0), InvalidArgument);
  EXPECT_THROW(sanitize(big, 0.1, 0.0, 0), InvalidArgument);
}

TEST(Sanitize, NoiseScaleWithinTwoPercent) {
  const ModelVector zero(10000, 0.0);
  double worst = 0.0;
  double pooled = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ModelVector v = sanitize(zero, 0.6, 1.0, seed);
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double sd = std::sqrt(ss / v.size());
    worst = std::max(worst, std::abs(sd - 0.6) / 0.6);
    pooled += ss;
  }
  EXPECT_LT(worst, 0.05);
  EXPECT_NEAR(std::sqrt(pooled / 1e6), 0.6, 0.012);
}

TEST(Sanitize, NoiseIsUnbiased) {
  const ModelVector zero(1, 0.0);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) sum += sanitize(zero, 0.6, 1.0, seed)[0];
  const double mean = sum / 10000;
  EXPECT_LT(std::abs(mean), 3 * 0.6 / std::sqrt(10000.0));
}

TEST(IntraCluster, Examples) {
  const ModelVector u1{1.0, -2.0, 0.5};
  const ModelVector u2{0.25, 4.0, -1.0};
  auto one = intra_cluster_aggregate(manual_cluster({3}, {1.0}), {{3, u1}});
  EXPECT_EQ(one.weighted_sum, u1);
  EXPECT_EQ(one.total_quality, 1.0);

  const ModelVector neg{-1.0, 2.0, -0.5};
  auto sym = intra_cluster_aggregate(manual_cluster({0, 1}, {2.5, 2.5}),
                                     {{0, u1}, {1, neg}});
  for (double v : sym.weighted_sum) EXPECT_EQ(v, 0.0);

  auto w = intra_cluster_aggregate(manual_cluster({0, 1}, {2.0, 1.0}),
                                   {{0, u1}, {1, u2}});
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(w.weighted_sum[j], 2 * u1[j] + u2[j]);
  EXPECT_EQ(w.total_quality, 3.0);

  EXPECT_THROW(intra_cluster_aggregate(manual_cluster({0, 1}, {1, 1}), {{0, u1}}),
               InvalidArgument);
}

TEST(GlobalAggregate, Examples) {
  const ModelVector u{0.5, -1.5};
  const std::vector<ClusterAggregate> single{{{1.0, 3.0}, 4.0}};
  const ModelVector a = global_aggregate(single);
  EXPECT_DOUBLE_EQ(a[0], 0.25);
  EXPECT_DOUBLE_EQ(a[1], 0.75);
  const std::vector<ClusterAggregate> two{{{1.0, -3.0}, 2.0}, {{0.5, -1.5}, 1.0}};
  const ModelVector b = global_aggregate(two);
  EXPECT_NEAR(b[0], u[0], 1e-15);
  EXPECT_NEAR(b[1], u[1], 1e-15);
  EXPECT_THROW(global_aggregate(std::vector<ClusterAggregate>{}), InvalidArgument);
  const std::vector<ClusterAggregate> zero{{{0.0, 0.0}, 0.0}};
  EXPECT_THROW(global_aggregate(zero), DegenerateConfig);
}

TEST(GlobalAggregate, ConstantUpdatesGiveTheConstant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> q(0.5, 90.0);
  const ModelVector u{0.125, -2.0, 7.5};
  std::vector<ClusterAggregate> parts;
  for (int k = 0; k < 4; ++k) {
    std::map<UserId, ModelVector> ups;
    std::vector<UserId> m;
    std::vector<double> qs;
    for (int i = 0; i < 3; ++i) {
      m.push_back(static_cast<UserId>(k * 3 + i));
      qs.push_back(q(rng));
      ups[m.back()] = u;
    }
    parts.push_back(intra_cluster_aggregate(manual_cluster(m, qs), ups));
  }
  const ModelVector g = global_aggregate(parts);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g[j], u[j], 1e-12);
}

TEST(GlobalAggregate, FedAvgDegeneracy) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  std::map<UserId, ModelVector> ups;
  ModelVector mean(16, 0.0);
  for (UserId u = 0; u < 10; ++u) {
    ModelVector v(16);
    for (double& x : v) x = z(rng);
    for (std::size_t j = 0; j < 16; ++j) mean[j] += v[j] / 10.0;
    ups[u] = v;
  }
  const Cluster all = manual_cluster({0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                                     std::vector<double>(10, 3.0));
  const std::vector<ClusterAggregate> parts{intra_cluster_aggregate(all, ups)};
  const ModelVector g = global_aggregate(parts);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(g[j], mean[j], 1e-12);
}

TEST(GlobalAggregate, PermutationInvariant) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> q(1.0, 100.0);
  std::map<UserId, ModelVector> ups;
  std::vector<double> qs(12);
  for (UserId u = 0; u < 12; ++u) {
    ModelVector v(8);
    for (double& x : v) x = z(rng);
    ups[u] = v;
    qs[u] = q(rng);
  }
  auto aggregate = [&](std::vector<std::vector<UserId>> blocks) {
    std::vector<ClusterAggregate> parts;
    for (auto& b : blocks) {
      std::vector<double> bq;
      for (UserId u : b) bq.push_back(qs[u]);
      parts.push_back(intra_cluster_aggregate(manual_cluster(b, bq), ups));
    }
    return global_aggregate(parts);
  };
  const ModelVector a = aggregate({{0, 1, 2, 3}, {4, 5, 6}, {7, 8, 9, 10, 11}});
  const ModelVector b = aggregate({{9, 7, 11, 10, 8}, {3, 2, 1, 0}, {6, 4, 5}});
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
}

TEST(RunRounds, NoiselessSingleClusterDescends) {
  const SyntheticTask task = small_task(5, 5);
  std::vector<double> q(5, 10.0);
  const std::vector<Cluster> clusters{manual_cluster({0, 1, 2, 3, 4}, q)};
  FlOptions o;
  o.rounds = 30;
  o.batch = 0;
  o.eta = 0.02;
  const FlResult r = run_rounds(task, clusters, o, 1);
  ASSERT_EQ(r.trace.size(), 30u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].test_loss, r.trace[i - 1].test_loss + 1e-12);
  }
}

TEST(RunRounds, OneRoundAndZeroRejected) {
  const SyntheticTask task = small_task();
  const std::vector<Cluster> clusters{manual_cluster({0, 1, 2, 3}, {1, 1, 1, 1})};
  FlOptions o;
  o.rounds = 1;
  const FlResult r = run_rounds(task, clusters, o, 2);
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].round, 1u);
  o.rounds = 0;
  EXPECT_THROW(run_rounds(task, clusters, o, 2), InvalidArgument);
}

TEST(RunRounds, TraceCsv) {
  std::ostringstream out;
  const std::vector<RoundRecord> trace{{1, 0.5, 2.0}};
  write_round_trace_csv(out, trace);
  EXPECT_EQ(out.str(), "round,test_loss,global_model_norm\n1,0.5,2\n");
}

TEST(SamplingRate, BatchOverDataset) {
  const SyntheticTask task = small_task();
  const double rows = static_cast<double>(task.users[0].rows());
  EXPECT_DOUBLE_EQ(sampling_rate(task, 0, 1), std::min(1.0, 1.0 / rows));
  EXPECT_EQ(sampling_rate(task, 0, 0), 1.0);
}

}  // namespace
}  // namespace socialfed
