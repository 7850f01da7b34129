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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "socialfed/federation_game.hpp"
#include "socialfed/quality_model.hpp"

namespace socialfed {

using ModelVector = std::vector<double>;

struct TaskSpec {
  std::size_t dim = 32;
  std::size_t n_users = 20;
  DirichletSpec dirichlet{};
  std::size_t samples_per_class = 100;
  std::size_t test_samples = 1000;
  double class_shift = 1.0;  // norm of each class's feature mean
  double label_noise = 0.1;  // sd of the target noise

  void validate() const;
};

struct LocalData {
  std::vector<double> features;  // row-major, rows() x dim
  std::vector<double> targets;
  std::size_t rows() const { return targets.size(); }
};

// Linear regression with Gaussian features whose mean depends on the class.
// Class counts per user come from dirichlet_partition.
struct SyntheticTask {
  std::size_t dim = 0;
  ModelVector truth;
  std::vector<LocalData> users;
  LocalData test;
};

// Users left without samples by the Dirichlet draw get one sample of a
// random class, so every dataset is non-empty.
SyntheticTask make_task(const TaskSpec& spec, std::uint64_t seed);

// Mean squared error of `model` on `data`.
double mse(const LocalData& data, std::span<const double> model);

double l2_norm(std::span<const double> v);

// Mini-batch SGD on the user's least-squares loss 0.5 * mean((x.w - y)^2).
// batch == 0 means full batch.
ModelVector local_train(const SyntheticTask& task, UserId user,
                        std::span<const double> global_model, double eta,
                        std::size_t epochs, std::size_t batch,
                        std::uint64_t seed);

// Ratio of batch size to the user's dataset size.
double sampling_rate(const SyntheticTask& task, UserId user,
                     std::size_t batch);

// Clips to L2 norm clip_norm, then adds N(0, (sigma * clip_norm)^2) to each
// coordinate.
ModelVector sanitize(std::span<const double> update, double sigma,
                     double clip_norm, std::uint64_t seed);

struct ClusterAggregate {
  ModelVector weighted_sum;
  double total_quality = 0.0;
};

// Sum of q_n * update_n over the members, in member order.
ClusterAggregate intra_cluster_aggregate(
    const Cluster& cluster, const std::map<UserId, ModelVector>& updates);

ModelVector global_aggregate(std::span<const ClusterAggregate> clusters);

struct FlOptions {
  std::size_t rounds = 20;
  double eta = 0.05;
  std::size_t epochs = 1;
  std::size_t batch = 16;
  double clip_norm = 1.0;
};

struct RoundRecord {
  std::size_t round = 0;
  double test_loss = 0.0;
  double global_model_norm = 0.0;
};

struct FlResult {
  ModelVector model;
  std::vector<RoundRecord> trace;
};

// Phases 3 to 5 from a zero model. Members with sigma 0 send their raw
// model; others send global + sanitize(local - global). The noise for
// (seed, round, user) is the same draw whatever the partition, scaled by
// the member's sigma.
FlResult run_rounds(const SyntheticTask& task, std::span<const Cluster> clusters,
                    const FlOptions& options, std::uint64_t seed);

void write_round_trace_csv(std::ostream& out,
                           std::span<const RoundRecord> trace);

}  // namespace socialfed
