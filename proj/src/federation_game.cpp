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

#include "socialfed/federation_game.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "socialfed/errors.hpp"

namespace socialfed {

void GameParams::validate() const {
  if (!(lambda_p > 0.0)) throw InvalidArgument("game: lambda_p must be > 0");
  if (!(lambda_c >= 0.0)) throw InvalidArgument("game: lambda_c must be >= 0");
  if (!(head_bonus >= 0.0))
    throw InvalidArgument("game: head bonus must be >= 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("game: gamma must be >= 0");
  privacy.validate();
  trust.validate();
  quality.validate();
  if (quality.sigma_max < privacy.sigma_max) {
    throw InvalidArgument(
        "game: quality model range ends below privacy sigma_max");
  }
}

double GameParams::solo_quality() const {
  return quality_at(quality, privacy.sigma_max, gamma);
}

double GameParams::singleton_value() const { return lambda_p * solo_quality(); }

std::size_t Cluster::index_of(UserId u) const {
  auto it = std::lower_bound(members.begin(), members.end(), u);
  if (it == members.end() || *it != u) {
    throw InvalidArgument("cluster: user " + std::to_string(u) +
                          " is not a member");
  }
  return static_cast<std::size_t>(it - members.begin());
}

bool Cluster::contains(UserId u) const {
  return std::binary_search(members.begin(), members.end(), u);
}

Cluster build_cluster(const TrustTable& trust, const GameParams& params,
                      std::vector<UserId> members,
                      std::optional<UserId> fixed_head) {
  if (members.empty()) throw InvalidArgument("build_cluster: no members");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw InvalidArgument("build_cluster: duplicate member");
  }
  for (UserId u : members) {
    if (u >= trust.size()) throw InvalidArgument("build_cluster: bad user id");
  }

  Cluster c;
  c.members = std::move(members);
  const std::size_t k = c.members.size();
  c.alphas.assign(k, 1.0);
  c.sigmas.assign(k, 0.0);
  c.qualities.assign(k, 0.0);

  if (fixed_head) {
    if (!std::binary_search(c.members.begin(), c.members.end(), *fixed_head))
      throw InvalidArgument("build_cluster: fixed head is not a member");
    c.head = *fixed_head;
  } else {
    int best = -1;
    for (UserId u : c.members) {
      const int degree = centrality(trust, u, c.members);
      if (degree > best) {
        best = degree;
        c.head = u;
      }
    }
  }

  if (k == 1) {
    c.sigmas[0] = params.privacy.sigma_max;
    c.qualities[0] = params.solo_quality();
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      const UserId u = c.members[i];
      if (u == c.head) {
        c.sigmas[i] = 0.0;
      } else {
        c.alphas[i] = trust.alpha(u, c.head);
        c.sigmas[i] = effective_noise_scale(params.privacy, c.alphas[i]);
      }
      c.qualities[i] = quality_at(params.quality, c.sigmas[i], params.gamma);
    }
  }
  c.utility = federal_utility(c, params);
  const std::vector<double> solo(trust.size(), params.singleton_value());
  c.payoffs = payoff_vector(c, params, solo);
  return c;
}

double federal_utility(const Cluster& c, const GameParams& params) {
  if (c.size() == 1) return params.singleton_value();
  const double total_quality =
      std::accumulate(c.qualities.begin(), c.qualities.end(), 0.0);
  return params.lambda_p * total_quality -
         params.lambda_c * static_cast<double>(c.size());
}

std::vector<double> payoff_vector(const Cluster& c, const GameParams& params,
                                  std::span<const double> singleton_values) {
  const std::size_t k = c.size();
  std::vector<double> psi(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (c.members[i] >= singleton_values.size()) {
      throw InvalidArgument("payoff_vector: missing singleton value");
    }
  }
  if (k == 1) {
    psi[0] = singleton_values[c.members[0]];
    return psi;
  }
  double total_quality = 0.0;
  double solo_total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    total_quality += c.qualities[i];
    solo_total += singleton_values[c.members[i]];
  }
  if (total_quality == 0.0) {
    throw DegenerateConfig("payoff_vector: cluster qualities sum to zero");
  }
  const double utility = federal_utility(c, params);
  const double surplus = utility - solo_total - params.head_bonus;
  for (std::size_t i = 0; i < k; ++i) {
    const double weight = c.qualities[i] / total_quality;
    psi[i] = weight * surplus + singleton_values[c.members[i]];
    if (c.members[i] == c.head) psi[i] += params.head_bonus;
  }
  return psi;
}

Partition Partition::singletons(std::size_t n_users) {
  std::vector<std::vector<UserId>> clusters(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    clusters[u] = {static_cast<UserId>(u)};
  }
  return from_clusters(n_users, std::move(clusters));
}

Partition Partition::grand(std::size_t n_users) {
  std::vector<UserId> all(n_users);
  std::iota(all.begin(), all.end(), UserId{0});
  return from_clusters(n_users, {std::move(all)});
}

Partition Partition::from_clusters(std::size_t n_users,
                                   std::vector<std::vector<UserId>> clusters) {
  audit_partition(n_users, clusters);
  Partition p;
  p.clusters_ = std::move(clusters);
  p.cluster_of_.assign(n_users, 0);
  p.canonicalize();
  return p;
}

void Partition::canonicalize() {
  std::erase_if(clusters_, [](const auto& c) { return c.empty(); });
  for (auto& c : clusters_) std::sort(c.begin(), c.end());
  std::sort(clusters_.begin(), clusters_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    for (UserId u : clusters_[k]) cluster_of_[u] = k;
  }
}

void audit_partition(std::size_t n_users,
                     const std::vector<std::vector<UserId>>& clusters) {
  std::vector<int> seen(n_users, 0);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (clusters[k].empty()) {
      throw LoadError("partition: cluster " + std::to_string(k) + " is empty");
    }
    for (UserId u : clusters[k]) {
      if (u >= n_users) {
        throw LoadError("partition: user " + std::to_string(u) +
                        " out of range");
      }
      if (seen[u]++ > 0) {
        throw LoadError("partition: user " + std::to_string(u) +
                        " appears in more than one cluster");
      }
    }
  }
  for (std::size_t u = 0; u < n_users; ++u) {
    if (seen[u] == 0) {
      throw LoadError("partition: user " + std::to_string(u) +
                      " is not covered");
    }
  }
}

std::vector<Cluster> evaluate_partition(const TrustTable& trust,
                                        const GameParams& params,
                                        const Partition& partition) {
  std::vector<Cluster> out;
  out.reserve(partition.n_clusters());
  for (const auto& members : partition.clusters()) {
    out.push_back(build_cluster(trust, params, members));
  }
  return out;
}

void History::add(std::span<const UserId> members) {
  if (contains(members)) return;
  rejected_.emplace_back(members.begin(), members.end());
}

bool History::contains(std::span<const UserId> members) const {
  return std::any_of(rejected_.begin(), rejected_.end(), [&](const auto& r) {
    return std::equal(r.begin(), r.end(), members.begin(), members.end());
  });
}

double preference_value(const TrustTable& trust, const GameParams& params,
                        UserId user, const Cluster* target,
                        const History* history) {
  if (target == nullptr) return params.singleton_value();
  if (target->contains(user)) {
    throw InvalidArgument("preference_value: user already in target");
  }
  if (history != nullptr && target->size() > 1 &&
      history->contains(target->members)) {
    return kRejected;
  }
  std::vector<UserId> joined = target->members;
  joined.push_back(user);
  const Cluster merged = build_cluster(trust, params, std::move(joined));
  for (std::size_t i = 0; i < target->size(); ++i) {
    const UserId l = target->members[i];
    if (merged.payoff_of(l) < target->payoffs[i] - kPayoffTolerance) {
      return kRejected;
    }
  }
  return merged.payoff_of(user);
}

std::vector<TransferOption> transferable_set(
    const TrustTable& trust, const GameParams& params, UserId user,
    const Partition& partition, std::span<const Cluster> evaluated,
    const History* history) {
  const std::size_t own = partition.cluster_of(user);
  const double current = evaluated[own].payoff_of(user);
  std::vector<TransferOption> options;
  for (std::size_t k = 0; k < partition.n_clusters(); ++k) {
    if (k == own) continue;
    const double value =
        preference_value(trust, params, user, &evaluated[k], history);
    if (value > current + kPayoffTolerance) options.push_back({k, value});
  }
  // Splitting off is only a move when the user is not already alone.
  if (evaluated[own].size() > 1) {
    const double value =
        preference_value(trust, params, user, nullptr, history);
    if (value > current + kPayoffTolerance) {
      options.push_back({std::nullopt, value});
    }
  }
  return options;
}

std::vector<TransferOption> transferable_set(const TrustTable& trust,
                                             const GameParams& params,
                                             UserId user,
                                             const Partition& partition,
                                             const History* history) {
  const auto evaluated = evaluate_partition(trust, params, partition);
  return transferable_set(trust, params, user, partition, evaluated, history);
}

std::optional<TransferOption> best_transfer(
    std::span<const TransferOption> options,
    std::span<const Cluster> evaluated) {
  std::optional<TransferOption> best;
  auto head_rank = [&](const TransferOption& o) -> std::size_t {
    return o.cluster ? evaluated[*o.cluster].head
                     : std::numeric_limits<std::size_t>::max();
  };
  for (const auto& o : options) {
    if (!best || o.value > best->value ||
        (o.value == best->value && head_rank(o) < head_rank(*best))) {
      best = o;
    }
  }
  return best;
}

std::vector<double> partition_payoffs(std::size_t n_users,
                                      std::span<const Cluster> evaluated) {
  std::vector<double> psi(n_users, 0.0);
  for (const auto& c : evaluated) {
    for (std::size_t i = 0; i < c.size(); ++i) psi[c.members[i]] = c.payoffs[i];
  }
  return psi;
}

double total_utility(std::span<const Cluster> evaluated) {
  double total = 0.0;
  for (const auto& c : evaluated) total += c.utility;
  return total;
}

}  // namespace socialfed
