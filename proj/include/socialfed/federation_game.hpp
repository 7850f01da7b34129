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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "socialfed/privacy_mapper.hpp"
#include "socialfed/quality_model.hpp"
#include "socialfed/social_graph.hpp"

namespace socialfed {

// Slack used when comparing payoffs that are equal in exact arithmetic.
inline constexpr double kPayoffTolerance = 1e-9;
inline constexpr double kRejected = -std::numeric_limits<double>::infinity();

struct GameParams {
  double lambda_p = 0.52;   // payment per unit of model quality
  double lambda_c = 1.2;    // communication cost per member
  double head_bonus = 30.0; // extra reward for the cluster head
  double gamma = 0.6;       // Dirichlet concentration of the task
  PrivacyParams privacy;
  TrustParams trust;
  QualityModel quality;

  void validate() const;

  // Quality of a solo trainer, who always adds sigma_max noise.
  double solo_quality() const;
  // Federal utility of a singleton, lambda_p * solo_quality().
  double singleton_value() const;
};

// A cluster with every per-member quantity resolved against its head.
// Per-member vectors are aligned with `members` (ascending ids).
struct Cluster {
  std::vector<UserId> members;
  UserId head = 0;
  std::vector<double> alphas;
  std::vector<double> sigmas;
  std::vector<double> qualities;
  double utility = 0.0;
  // Individual payoffs, head bonus included.
  std::vector<double> payoffs;

  std::size_t size() const { return members.size(); }
  std::size_t index_of(UserId u) const;
  bool contains(UserId u) const;
  double payoff_of(UserId u) const { return payoffs[index_of(u)]; }
};

// Head is the member with the most in-cluster neighbours, ties to the lowest
// id, unless `fixed_head` pins it. Throws on an empty member set.
Cluster build_cluster(const TrustTable& trust, const GameParams& params,
                      std::vector<UserId> members,
                      std::optional<UserId> fixed_head = std::nullopt);

double federal_utility(const Cluster& c, const GameParams& params);

// Proportional division of the cluster surplus by member quality.
// `singleton_values` is indexed by UserId. Throws DegenerateConfig when the
// qualities of a multi-member cluster sum to zero.
std::vector<double> payoff_vector(const Cluster& c, const GameParams& params,
                                  std::span<const double> singleton_values);

// Disjoint clusters covering [0, N). Clusters are kept sorted by their
// smallest member, members ascending.
class Partition {
 public:
  Partition() = default;
  static Partition singletons(std::size_t n_users);
  static Partition grand(std::size_t n_users);
  // Throws LoadError unless `clusters` is a partition of [0, n_users).
  static Partition from_clusters(std::size_t n_users,
                                 std::vector<std::vector<UserId>> clusters);

  std::size_t n_users() const { return cluster_of_.size(); }
  std::size_t n_clusters() const { return clusters_.size(); }
  const std::vector<std::vector<UserId>>& clusters() const { return clusters_; }
  const std::vector<UserId>& cluster(std::size_t k) const {
    return clusters_[k];
  }
  std::size_t cluster_of(UserId u) const { return cluster_of_[u]; }

  bool operator==(const Partition& other) const {
    return clusters_ == other.clusters_;
  }

 private:
  void canonicalize();

  std::vector<std::vector<UserId>> clusters_;
  std::vector<std::size_t> cluster_of_;
};

// Throws LoadError describing the first disjointness or coverage violation.
void audit_partition(std::size_t n_users,
                     const std::vector<std::vector<UserId>>& clusters);

std::vector<Cluster> evaluate_partition(const TrustTable& trust,
                                        const GameParams& params,
                                        const Partition& partition);

// Member sets of multi-member clusters that rejected a user. An entry only
// matches a cluster whose current membership is identical.
class History {
 public:
  void add(std::span<const UserId> members);
  bool contains(std::span<const UserId> members) const;
  std::size_t size() const { return rejected_.size(); }
  const std::vector<std::vector<UserId>>& entries() const { return rejected_; }

 private:
  std::vector<std::vector<UserId>> rejected_;
};

// Payoff `user` would receive in target+{user}, or kRejected when an
// incumbent would lose or the target is in `history`. A null target is the
// singleton fallback, which is always admissible.
double preference_value(const TrustTable& trust, const GameParams& params,
                        UserId user, const Cluster* target,
                        const History* history);

struct TransferOption {
  std::optional<std::size_t> cluster;  // nullopt means "form a singleton"
  double value = kRejected;
};

// Targets in partition + {empty} that strictly improve on the user's current
// payoff, in partition order with the singleton option last. `evaluated`
// must be evaluate_partition(trust, params, partition).
std::vector<TransferOption> transferable_set(
    const TrustTable& trust, const GameParams& params, UserId user,
    const Partition& partition, std::span<const Cluster> evaluated,
    const History* history);

std::vector<TransferOption> transferable_set(const TrustTable& trust,
                                             const GameParams& params,
                                             UserId user,
                                             const Partition& partition,
                                             const History* history);

// Highest value, ties to the lowest head id, the singleton option losing
// ties. Returns nullopt for an empty set.
std::optional<TransferOption> best_transfer(
    std::span<const TransferOption> options,
    std::span<const Cluster> evaluated);

// Per-user payoffs of a whole partition.
std::vector<double> partition_payoffs(std::size_t n_users,
                                      std::span<const Cluster> evaluated);

double total_utility(std::span<const Cluster> evaluated);

}  // namespace socialfed
