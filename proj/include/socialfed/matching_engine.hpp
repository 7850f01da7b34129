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
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialfed/federation_game.hpp"

namespace socialfed {

struct MetricsRecord {
  std::size_t iteration = 0;
  std::size_t n_clusters = 0;
  double avg_cluster_size = 0.0;
  double avg_payoff = 0.0;
  std::size_t n_transfers = 0;
  std::size_t comm_cost_bytes = 0;
  // Merge requests sent to non-empty clusters (each answered once).
  std::size_t n_requests = 0;
};

struct EngineOptions {
  std::size_t max_iter = 1000;
  std::size_t message_bytes = 64;
};

struct EngineState {
  Partition partition;
  std::vector<Cluster> evaluated;  // evaluate_partition(partition)
  std::size_t iteration = 0;
  std::vector<History> histories;  // one per user, append-only
  // Flags of the iteration most recently executed, indexed by the cluster
  // order of the partition that iteration started from.
  std::vector<bool> frozen_leave;  // admitted a user
  std::vector<bool> frozen_join;   // lost a member
  std::vector<MetricsRecord> metrics;
};

EngineState make_state(const TrustTable& trust, const GameParams& params,
                       Partition initial);

struct StepOutcome {
  std::size_t transfers = 0;
  std::size_t requests = 0;
  // Clusters (pre-step order) that both gained and lost a member. Always
  // empty unless the membership rules are broken.
  std::vector<std::size_t> rule_violations;
};

// One iteration: users pick their best transfer, clusters admit their best
// candidate, users preferring to be alone split off.
StepOutcome step(EngineState& state, const TrustTable& trust,
                 const GameParams& params, const EngineOptions& options = {});

// Bytes exchanged for `requests` merge requests and their replies.
std::size_t comm_cost(std::size_t requests, std::size_t message_bytes);

// Per-iteration communication cost recorded in the state's metrics.
std::vector<std::size_t> comm_cost(const EngineState& state);

struct RunResult {
  Partition partition;
  std::vector<Cluster> clusters;
  std::vector<double> payoffs;  // indexed by UserId
  std::vector<MetricsRecord> metrics;
  std::vector<History> histories;
  bool converged = false;
  std::size_t iterations = 0;  // steps executed
};

// Steps until an iteration moves nobody or max_iter steps have run.
RunResult run_to_stable(const TrustTable& trust, const GameParams& params,
                        Partition initial, const EngineOptions& options = {});

enum class InitMode { kSingletons, kWarmStart };

// Singletons, or a persisted partition loaded from `warm_start_path`.
Partition init_partition(InitMode mode, const TrustTable& trust,
                         const std::string& warm_start_path = {});

// {clusters: [{head, members[], sigmas[], qualities[]}], iteration, converged}
nlohmann::json partition_to_json(std::span<const Cluster> clusters,
                                 std::size_t iteration, bool converged);
Partition partition_from_json(const nlohmann::json& doc, std::size_t n_users);

void write_metrics_csv(std::ostream& out,
                       std::span<const MetricsRecord> metrics);

}  // namespace socialfed
