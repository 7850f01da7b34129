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

#include "socialfed/ego_network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_set>

#include "socialfed/errors.hpp"

namespace socialfed {

namespace {

class EdgeSet {
 public:
  bool insert(UserId a, UserId b) {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (std::uint64_t{a} << 32) | b;
    if (!keys_.insert(key).second) return false;
    rows_.push_back({a, b, std::nullopt});
    return true;
  }
  std::vector<ParsedEdgeList::Row> take() { return std::move(rows_); }

 private:
  std::unordered_set<std::uint64_t> keys_;
  std::vector<ParsedEdgeList::Row> rows_;
};

std::size_t max_edges(std::size_t n, double density) {
  return static_cast<std::size_t>(density * static_cast<double>(n) *
                                  static_cast<double>(n - 1) / 2.0);
}

// Draws up to `target` new edges among `nodes` with endpoint probability
// proportional to `weights`. Returns the number added.
std::size_t chung_lu(const std::vector<UserId>& nodes,
                     const std::vector<double>& weights, std::size_t target,
                     EdgeSet& edges, std::mt19937_64& rng) {
  if (nodes.size() < 2 || target == 0) return 0;
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::size_t added = 0;
  const std::size_t budget = 50 * target + 1000;
  for (std::size_t tries = 0; tries < budget && added < target; ++tries) {
    if (edges.insert(nodes[pick(rng)], nodes[pick(rng)])) ++added;
  }
  return added;
}

}  // namespace

void EgoNetworkSpec::validate() const {
  if (alters.empty()) throw InvalidArgument("ego network: no egos");
  if (alters.size() != internal_edges.size())
    throw InvalidArgument("ego network: alters and edge counts differ in length");
  const std::size_t slots =
      alters.size() + std::accumulate(alters.begin(), alters.end(), std::size_t{0});
  if (n_nodes > slots)
    throw InvalidArgument("ego network: more nodes than ego slots");
  if (n_nodes < alters.front() + 1)
    throw InvalidArgument("ego network: too few nodes for the first ego");
  if (!(circle_fraction >= 0.0 && circle_fraction <= 1.0))
    throw InvalidArgument("ego network: circle_fraction must lie in [0,1]");
  if (!(mean_circle_size >= 2.0))
    throw InvalidArgument("ego network: mean_circle_size must be >= 2");
  if (!(pareto_shape > 1.0))
    throw InvalidArgument("ego network: pareto_shape must be > 1");
  if (!(max_density > 0.0 && max_density <= 1.0))
    throw InvalidArgument("ego network: max_density must lie in (0,1]");
}

ParsedEdgeList generate_ego_network(const EgoNetworkSpec& spec,
                                    std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const std::size_t n_egos = spec.alters.size();

  // Node sharing between consecutive ego networks.
  const std::size_t slots =
      n_egos + std::accumulate(spec.alters.begin(), spec.alters.end(),
                               std::size_t{0});
  std::size_t overlap = slots - spec.n_nodes;
  std::vector<std::size_t> shared(n_egos, 0);
  for (std::size_t k = 1; k < n_egos && overlap > 0; ++k) {
    const std::size_t rest = n_egos - k;
    shared[k] = std::min({(overlap + rest - 1) / rest, spec.alters[k - 1],
                          spec.alters[k] + 1});
    overlap -= shared[k];
  }
  if (overlap > 0) throw InvalidArgument("ego network: overlap not placeable");

  EdgeSet edges;
  UserId next_id = 0;
  std::vector<UserId> prev_alters;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> circle_share(2.0, 1.0);

  for (std::size_t k = 0; k < n_egos; ++k) {
    std::vector<UserId> reused = prev_alters;
    std::shuffle(reused.begin(), reused.end(), rng);
    reused.resize(shared[k]);
    UserId ego;
    if (!reused.empty()) {
      ego = reused.back();
      reused.pop_back();
    } else {
      ego = next_id++;
    }
    std::vector<UserId> alters = reused;
    while (alters.size() < spec.alters[k]) alters.push_back(next_id++);
    for (UserId a : alters) edges.insert(ego, a);

    std::vector<double> weights(alters.size());
    for (double& w : weights)
      w = std::pow(1.0 - unit(rng), -1.0 / spec.pareto_shape);

    // Circles: contiguous runs of a shuffled alter order.
    std::vector<std::size_t> order(alters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_circles = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(
               static_cast<double>(alters.size()) / spec.mean_circle_size)));
    std::vector<double> shares(n_circles);
    for (double& s : shares) s = circle_share(rng);
    const double share_sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    std::vector<std::size_t> sizes(n_circles);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < n_circles; ++c) {
      sizes[c] = c + 1 == n_circles
                     ? alters.size() - assigned
                     : std::min(alters.size() - assigned,
                                static_cast<std::size_t>(std::lround(
                                    shares[c] / share_sum *
                                    static_cast<double>(alters.size()))));
      assigned += sizes[c];
    }

    const std::size_t target =
        std::min(spec.internal_edges[k], max_edges(alters.size(), spec.max_density));
    double square_sum = 0.0;
    for (std::size_t s : sizes) square_sum += static_cast<double>(s * s);
    std::size_t placed = 0;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < n_circles; ++c) {
      std::vector<UserId> nodes;
      std::vector<double> w;
      for (std::size_t i = offset; i < offset + sizes[c]; ++i) {
        nodes.push_back(alters[order[i]]);
        w.push_back(weights[order[i]]);
      }
      offset += sizes[c];
      if (nodes.size() < 2) continue;
      const double want = spec.circle_fraction *
                          static_cast<double>(target) *
                          static_cast<double>(sizes[c] * sizes[c]) / square_sum;
      const std::size_t circle_target =
          std::min(static_cast<std::size_t>(std::lround(want)),
                   max_edges(nodes.size(), spec.max_density));
      placed += chung_lu(nodes, w, circle_target, edges, rng);
    }
    if (placed < target) {
      placed += chung_lu(alters, weights, target - placed, edges, rng);
    }
    prev_alters = std::move(alters);
    prev_alters.push_back(ego);
  }

  ParsedEdgeList out;
  out.original_ids.resize(next_id);
  std::iota(out.original_ids.begin(), out.original_ids.end(), std::int64_t{0});
  out.rows = edges.take();
  return out;
}

void write_edge_list(std::ostream& out, const ParsedEdgeList& edges) {
  for (const auto& r : edges.rows) {
    out << edges.original_ids[r.u] << ' ' << edges.original_ids[r.v];
    if (r.weight) out << ' ' << *r.weight;
    out << '\n';
  }
}

}  // namespace socialfed
