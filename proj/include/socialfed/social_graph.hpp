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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace socialfed {

// Dense user index in [0, N).
using UserId = std::uint32_t;

enum class InteractionSign { kPositive, kNegative };

struct Interaction {
  InteractionSign sign = InteractionSign::kPositive;
  double timestamp = 0.0;
};

struct TrustParams {
  double nu = 1.0;     // penalty on negative interactions
  double xi = 0.1;     // time-decay rate
  double omega = 0.8;  // weight of direct trust in global trust
  int path_len = 2;

  void validate() const;
};

struct Edge {
  UserId to;
  double closeness;
};

// Directed, weighted social graph with optional interaction histories.
//
// Closeness e(n,m) lives in [0,1]; a missing edge means e(n,m) = 0. The graph
// is built single-threaded and is read-only afterwards.
class SocialGraph {
 public:
  SocialGraph() = default;
  explicit SocialGraph(std::size_t n_users, double eval_time = 0.0);

  std::size_t size() const { return out_.size(); }
  double eval_time() const { return eval_time_; }
  void set_eval_time(double t) { eval_time_ = t; }

  // Setting closeness to 0 removes the edge.
  void set_closeness(UserId n, UserId m, double e);
  double closeness(UserId n, UserId m) const;
  std::span<const Edge> out_edges(UserId n) const;
  std::size_t edge_count() const;

  void add_interaction(UserId n, UserId m, Interaction interaction);
  std::span<const Interaction> interactions(UserId n, UserId m) const;
  bool has_interactions() const { return !interactions_.empty(); }

  void remove_all_edges();

 private:
  void check_user(UserId u) const;

  std::vector<std::vector<Edge>> out_;  // sorted by Edge::to
  std::map<std::pair<UserId, UserId>, std::vector<Interaction>> interactions_;
  double eval_time_ = 0.0;
};

// Time-decayed interaction score, clamped at zero. Empty history yields 0.
double direct_trust(const SocialGraph& g, const TrustParams& p, UserId n,
                    UserId m);

// Mean over all 2-hop paths n->l->m of e(n,l)*e(l,m); 0 without such a path.
double indirect_trust(const SocialGraph& g, UserId n, UserId m);

// Direct trust used inside global trust: the interaction score when the
// graph carries histories, stored closeness otherwise.
double effective_direct_trust(const SocialGraph& g, const TrustParams& p,
                              UserId n, UserId m);

double global_trust(const SocialGraph& g, const TrustParams& p, UserId n,
                    UserId m);

// Number of members l != n with e(n,l) > 0.
int centrality(const SocialGraph& g, UserId n, std::span<const UserId> cluster);

// Frozen pairwise closeness and global trust over a participant subset.
//
// Indirect trust is evaluated on the full graph, so intermediaries outside
// the participant set still contribute.
class TrustTable {
 public:
  TrustTable() = default;
  explicit TrustTable(std::size_t n);

  static TrustTable build(const SocialGraph& g, const TrustParams& p,
                          std::span<const UserId> participants);

  std::size_t size() const { return n_; }
  double closeness(UserId i, UserId j) const { return closeness_[i * n_ + j]; }
  double alpha(UserId i, UserId j) const { return alpha_[i * n_ + j]; }
  void set_closeness(UserId i, UserId j, double e);
  void set_alpha(UserId i, UserId j, double a);
  bool connected(UserId i, UserId j) const { return closeness(i, j) > 0.0; }

  bool from_interactions = false;

 private:
  std::size_t n_ = 0;
  std::vector<double> closeness_;
  std::vector<double> alpha_;
};

// Centrality computed from a frozen table.
int centrality(const TrustTable& t, UserId n, std::span<const UserId> cluster);

// Rejection sampler for N(mean, sd) restricted to [lo, hi].
double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               std::mt19937_64& rng);

struct ClosenessSynthesis {
  double mean = 0.5;
  double sd = 0.25;
};

struct ParsedEdgeList {
  std::vector<std::int64_t> original_ids;  // dense index -> file id
  struct Row {
    UserId u;
    UserId v;
    std::optional<double> weight;
  };
  std::vector<Row> rows;
};

// Whitespace separated "u v" or "u v w" rows; '#' lines are comments.
ParsedEdgeList parse_edge_list(std::istream& in);

// Unweighted rows produce both directions with independently sampled
// closeness; weighted rows set e(u,v) exactly.
SocialGraph build_graph(const ParsedEdgeList& edges,
                        const ClosenessSynthesis& synth, std::uint64_t seed);

// CSV rows "n,m,sign,timestamp" with ids in the graph's dense index space.
// Sign accepts +, -, 1, -1, positive, negative.
void load_interactions(std::istream& in, SocialGraph& g);

}  // namespace socialfed
