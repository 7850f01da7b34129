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
#include <vector>

#include "socialfed/social_graph.hpp"

namespace socialfed {

// Shape of a union of ego networks. The defaults follow the published
// statistics of the SNAP ego-Facebook graph (4039 nodes, ten egos, per-ego
// alter and alter-alter edge counts) so that runs without the real file
// see a graph of the same size, density and community structure.
struct EgoNetworkSpec {
  std::size_t n_nodes = 4039;
  std::vector<std::size_t> alters{347, 1045, 227, 159, 170,
                                  66,  792,  755, 547, 59};
  std::vector<std::size_t> internal_edges{2519,  26749, 3192, 1693, 1656,
                                          270,   14024, 30025, 4813, 146};
  double circle_fraction = 0.85;   // share of alter edges inside circles
  double mean_circle_size = 30.0;
  double pareto_shape = 2.5;       // tail of the Chung-Lu degree weights
  double max_density = 0.8;        // per group cap on filled pairs

  void validate() const;
};

// Each ego links to all its alters. Consecutive ego networks share nodes so
// that the union has exactly n_nodes. Alters are split into circles and
// edges are drawn Chung-Lu style, mostly inside circles.
ParsedEdgeList generate_ego_network(const EgoNetworkSpec& spec,
                                    std::uint64_t seed);

// Writes "u v" lines, loadable with parse_edge_list.
void write_edge_list(std::ostream& out, const ParsedEdgeList& edges);

}  // namespace socialfed
