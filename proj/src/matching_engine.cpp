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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>

#include "socialfed/errors.hpp"

namespace socialfed {

namespace {

MetricsRecord summarize(std::size_t iteration, const Partition& partition,
                        std::span<const Cluster> evaluated) {
  MetricsRecord r;
  r.iteration = iteration;
  r.n_clusters = partition.n_clusters();
  r.avg_cluster_size = static_cast<double>(partition.n_users()) /
                       static_cast<double>(partition.n_clusters());
  const auto psi = partition_payoffs(partition.n_users(), evaluated);
  r.avg_payoff = std::accumulate(psi.begin(), psi.end(), 0.0) /
                 static_cast<double>(psi.size());
  return r;
}

struct Request {
  std::optional<std::size_t> target;  // nullopt: split to a singleton
  double value = kRejected;
};

}  // namespace

EngineState make_state(const TrustTable& trust, const GameParams& params,
                       Partition initial) {
  if (initial.n_users() != trust.size()) {
    throw InvalidArgument("engine: partition and trust table sizes differ");
  }
  EngineState state;
  state.partition = std::move(initial);
  state.evaluated = evaluate_partition(trust, params, state.partition);
  state.histories.assign(trust.size(), History{});
  state.metrics.push_back(summarize(0, state.partition, state.evaluated));
  return state;
}

std::size_t comm_cost(std::size_t requests, std::size_t message_bytes) {
  return 2 * requests * message_bytes;
}

std::vector<std::size_t> comm_cost(const EngineState& state) {
  std::vector<std::size_t> out;
  out.reserve(state.metrics.size());
  for (const auto& m : state.metrics) out.push_back(m.comm_cost_bytes);
  return out;
}

StepOutcome step(EngineState& state, const TrustTable& trust,
                 const GameParams& params, const EngineOptions& options) {
  const Partition& snapshot = state.partition;
  const std::span<const Cluster> evaluated = state.evaluated;
  const std::size_t n = snapshot.n_users();
  const std::size_t k_clusters = snapshot.n_clusters();
  StepOutcome outcome;

  // Users, ascending id: one request to the best transferable target.
  std::vector<std::optional<Request>> requests(n);
  for (UserId u = 0; u < n; ++u) {
    const auto options_u = transferable_set(trust, params, u, snapshot,
                                            evaluated, &state.histories[u]);
    if (auto best = best_transfer(options_u, evaluated)) {
      requests[u] = Request{best->cluster, best->value};
      if (best->cluster) ++outcome.requests;
    }
  }

  std::vector<std::vector<UserId>> working = snapshot.clusters();
  std::vector<std::size_t> home(n);
  for (UserId u = 0; u < n; ++u) home[u] = snapshot.cluster_of(u);
  std::vector<bool> admitted(k_clusters, false);
  std::vector<bool> lost(k_clusters, false);
  std::vector<bool> gained_any(k_clusters, false);
  std::vector<bool> lost_any(k_clusters, false);

  // Clusters, ascending head id: admit the best eligible candidate.
  std::vector<std::size_t> order(k_clusters);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return evaluated[a].head < evaluated[b].head;
  });
  for (std::size_t k : order) {
    std::vector<UserId> candidates;
    for (UserId u = 0; u < n; ++u) {
      if (requests[u] && requests[u]->target == k) candidates.push_back(u);
    }
    if (candidates.empty()) continue;
    const auto& members = snapshot.cluster(k);
    if (lost[k]) {
      // Joining rule: a cluster that lost a member admits nobody.
      for (UserId u : candidates) state.histories[u].add(members);
      continue;
    }
    std::optional<UserId> chosen;
    for (UserId u : candidates) {
      // Leaving rule: members of a cluster that admitted cannot leave.
      if (admitted[home[u]]) continue;
      if (!chosen || requests[u]->value > requests[*chosen]->value) chosen = u;
    }
    if (!chosen) continue;
    for (UserId u : candidates) {
      if (u != *chosen && !admitted[home[u]]) state.histories[u].add(members);
    }
    const std::size_t src = home[*chosen];
    std::erase(working[src], *chosen);
    working[k].push_back(*chosen);
    admitted[k] = true;
    lost[src] = true;
    gained_any[k] = true;
    lost_any[src] = true;
    ++outcome.transfers;
  }

  // Splits, ascending id, unless the user's cluster admitted someone.
  for (UserId u = 0; u < n; ++u) {
    if (!requests[u] || requests[u]->target) continue;
    const std::size_t src = home[u];
    if (admitted[src]) continue;
    std::erase(working[src], u);
    working.push_back({u});
    lost[src] = true;
    lost_any[src] = true;
    ++outcome.transfers;
  }

  for (std::size_t k = 0; k < k_clusters; ++k) {
    if (gained_any[k] && lost_any[k]) outcome.rule_violations.push_back(k);
  }

  state.frozen_leave = std::move(admitted);
  state.frozen_join = std::move(lost);
  std::erase_if(working, [](const auto& c) { return c.empty(); });
  state.partition = Partition::from_clusters(n, std::move(working));
  state.evaluated = evaluate_partition(trust, params, state.partition);
  ++state.iteration;

  MetricsRecord record =
      summarize(state.iteration, state.partition, state.evaluated);
  record.n_transfers = outcome.transfers;
  record.n_requests = outcome.requests;
  record.comm_cost_bytes = comm_cost(outcome.requests, options.message_bytes);
  state.metrics.push_back(record);
  return outcome;
}

RunResult run_to_stable(const TrustTable& trust, const GameParams& params,
                        Partition initial, const EngineOptions& options) {
  if (options.max_iter < 1) throw InvalidArgument("engine: max_iter < 1");
  params.validate();
  EngineState state = make_state(trust, params, std::move(initial));
  RunResult result;
  while (state.iteration < options.max_iter) {
    const StepOutcome outcome = step(state, trust, params, options);
    if (outcome.transfers == 0) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iteration;
  result.partition = state.partition;
  result.clusters = state.evaluated;
  result.payoffs = partition_payoffs(trust.size(), state.evaluated);
  result.metrics = std::move(state.metrics);
  result.histories = std::move(state.histories);
  return result;
}

Partition init_partition(InitMode mode, const TrustTable& trust,
                         const std::string& warm_start_path) {
  if (mode == InitMode::kSingletons) return Partition::singletons(trust.size());
  std::ifstream in(warm_start_path);
  if (!in) throw LoadError("warm start: cannot open " + warm_start_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("warm start: ") + e.what());
  }
  return partition_from_json(doc, trust.size());
}

nlohmann::json partition_to_json(std::span<const Cluster> clusters,
                                 std::size_t iteration, bool converged) {
  nlohmann::json doc;
  doc["clusters"] = nlohmann::json::array();
  for (const auto& c : clusters) {
    doc["clusters"].push_back({{"head", c.head},
                               {"members", c.members},
                               {"sigmas", c.sigmas},
                               {"qualities", c.qualities}});
  }
  doc["iteration"] = iteration;
  doc["converged"] = converged;
  return doc;
}

Partition partition_from_json(const nlohmann::json& doc, std::size_t n_users) {
  if (!doc.is_object() || !doc.contains("clusters") ||
      !doc["clusters"].is_array()) {
    throw LoadError("partition: missing clusters array");
  }
  std::vector<std::vector<UserId>> clusters;
  try {
    for (const auto& c : doc["clusters"]) {
      clusters.push_back(c.at("members").get<std::vector<UserId>>());
      const auto head = c.at("head").get<UserId>();
      if (std::find(clusters.back().begin(), clusters.back().end(), head) ==
          clusters.back().end()) {
        throw LoadError("partition: head is not a member of its cluster");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("partition: ") + e.what());
  }
  return Partition::from_clusters(n_users, std::move(clusters));
}

void write_metrics_csv(std::ostream& out,
                       std::span<const MetricsRecord> metrics) {
  out << "iteration,n_clusters,avg_cluster_size,avg_payoff,n_transfers,"
         "comm_cost_bytes\n";
  for (const auto& m : metrics) {
    out << m.iteration << ',' << m.n_clusters << ',' << m.avg_cluster_size
        << ',' << m.avg_payoff << ',' << m.n_transfers << ','
        << m.comm_cost_bytes << '\n';
  }
}

}  // namespace socialfed
