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

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "socialfed/federation_game.hpp"
#include "socialfed/social_graph.hpp"

namespace socialfed::testing {

// Erdos-Renyi friendship graph of n users with truncated-normal closeness
// in both directions, turned into a trust table.
inline TrustTable random_trust(std::uint64_t seed, std::size_t n,
                               double edge_prob = 0.5) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution link(edge_prob);
  SocialGraph g(n);
  for (UserId a = 0; a < n; ++a) {
    for (UserId b = a + 1; b < n; ++b) {
      if (!link(rng)) continue;
      g.set_closeness(a, b,
                      std::max(1e-12, sample_truncated_normal(0.5, 0.25, 0, 1, rng)));
      g.set_closeness(b, a,
                      std::max(1e-12, sample_truncated_normal(0.5, 0.25, 0, 1, rng)));
    }
  }
  std::vector<UserId> all(n);
  for (UserId u = 0; u < n; ++u) all[u] = u;
  return TrustTable::build(g, TrustParams{}, all);
}

// Trust table with explicit alpha and closeness everywhere.
inline TrustTable uniform_trust(std::size_t n, double closeness, double alpha) {
  TrustTable t(n);
  for (UserId a = 0; a < n; ++a) {
    for (UserId b = 0; b < n; ++b) {
      if (a == b) continue;
      t.set_closeness(a, b, closeness);
      t.set_alpha(a, b, alpha);
    }
  }
  return t;
}

struct Deviation {
  UserId user;
  std::optional<std::size_t> target;
};

// Second, deliberately plain stability scan: rebuilds every cluster from its
// member list and compares payoffs directly.
inline std::optional<Deviation> naive_deviation(const TrustTable& trust,
                                                const GameParams& params,
                                                const Partition& partition) {
  const auto& blocks = partition.clusters();
  for (UserId u = 0; u < partition.n_users(); ++u) {
    std::size_t own = 0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      for (UserId m : blocks[k]) {
        if (m == u) own = k;
      }
    }
    const Cluster home = build_cluster(trust, params, blocks[own]);
    const double now = home.payoffs[home.index_of(u)];
    if (blocks[own].size() > 1 && params.singleton_value() > now + 1e-9) {
      return Deviation{u, std::nullopt};
    }
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      if (k == own) continue;
      const Cluster before = build_cluster(trust, params, blocks[k]);
      std::vector<UserId> joined = blocks[k];
      joined.push_back(u);
      const Cluster after = build_cluster(trust, params, joined);
      bool ok = true;
      for (UserId l : blocks[k]) {
        if (after.payoffs[after.index_of(l)] <
            before.payoffs[before.index_of(l)] - 1e-9) {
          ok = false;
        }
      }
      if (ok && after.payoffs[after.index_of(u)] > now + 1e-9) {
        return Deviation{u, k};
      }
    }
  }
  return std::nullopt;
}

}  // namespace socialfed::testing
