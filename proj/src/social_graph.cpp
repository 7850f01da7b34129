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

#include "socialfed/social_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "socialfed/errors.hpp"

namespace socialfed {

void TrustParams::validate() const {
  if (!(nu > 0.0)) throw InvalidArgument("trust: nu must be positive");
  if (!(xi > 0.0)) throw InvalidArgument("trust: xi must be positive");
  if (!(omega >= 0.0 && omega <= 1.0))
    throw InvalidArgument("trust: omega must lie in [0,1]");
  if (path_len != 2) throw InvalidArgument("trust: path_len must be 2");
}

SocialGraph::SocialGraph(std::size_t n_users, double eval_time)
    : out_(n_users), eval_time_(eval_time) {}

void SocialGraph::check_user(UserId u) const {
  if (u >= out_.size()) {
    throw InvalidArgument("social graph: user " + std::to_string(u) +
                          " out of range");
  }
}

void SocialGraph::set_closeness(UserId n, UserId m, double e) {
  check_user(n);
  check_user(m);
  if (n == m) throw InvalidArgument("social graph: self edge");
  if (!(e >= 0.0 && e <= 1.0))
    throw InvalidArgument("social graph: closeness must lie in [0,1]");
  auto& edges = out_[n];
  auto it = std::lower_bound(edges.begin(), edges.end(), m,
                             [](const Edge& a, UserId b) { return a.to < b; });
  const bool present = it != edges.end() && it->to == m;
  if (e == 0.0) {
    if (present) edges.erase(it);
  } else if (present) {
    it->closeness = e;
  } else {
    edges.insert(it, Edge{m, e});
  }
}

double SocialGraph::closeness(UserId n, UserId m) const {
  check_user(n);
  check_user(m);
  const auto& edges = out_[n];
  auto it = std::lower_bound(edges.begin(), edges.end(), m,
                             [](const Edge& a, UserId b) { return a.to < b; });
  return (it != edges.end() && it->to == m) ? it->closeness : 0.0;
}

std::span<const Edge> SocialGraph::out_edges(UserId n) const {
  check_user(n);
  return out_[n];
}

std::size_t SocialGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& e : out_) total += e.size();
  return total;
}

void SocialGraph::add_interaction(UserId n, UserId m,
                                  Interaction interaction) {
  check_user(n);
  check_user(m);
  if (n == m) throw InvalidArgument("social graph: self interaction");
  if (interaction.timestamp > eval_time_) {
    throw InvalidArgument("social graph: interaction after evaluation time");
  }
  interactions_[{n, m}].push_back(interaction);
}

std::span<const Interaction> SocialGraph::interactions(UserId n,
                                                       UserId m) const {
  auto it = interactions_.find({n, m});
  if (it == interactions_.end()) return {};
  return it->second;
}

void SocialGraph::remove_all_edges() {
  for (auto& e : out_) e.clear();
}

double direct_trust(const SocialGraph& g, const TrustParams& p, UserId n,
                    UserId m) {
  if (n == m) throw InvalidArgument("direct_trust: n == m");
  const auto history = g.interactions(n, m);
  if (history.empty()) return 0.0;
  double positive = 0.0;
  double negative = 0.0;
  for (const Interaction& b : history) {
    const double decay = std::exp(-p.xi * (g.eval_time() - b.timestamp));
    if (b.sign == InteractionSign::kPositive) {
      positive += decay;
    } else {
      negative += decay;
    }
  }
  const double score =
      (positive - p.nu * negative) / static_cast<double>(history.size());
  return std::clamp(score, 0.0, 1.0);
}

double indirect_trust(const SocialGraph& g, UserId n, UserId m) {
  if (n == m) throw InvalidArgument("indirect_trust: n == m");
  double sum = 0.0;
  std::size_t paths = 0;
  for (const Edge& first : g.out_edges(n)) {
    if (first.to == m) continue;
    const double second = g.closeness(first.to, m);
    if (second > 0.0) {
      sum += first.closeness * second;
      ++paths;
    }
  }
  return paths == 0 ? 0.0 : sum / static_cast<double>(paths);
}

double effective_direct_trust(const SocialGraph& g, const TrustParams& p,
                              UserId n, UserId m) {
  return g.has_interactions() ? direct_trust(g, p, n, m) : g.closeness(n, m);
}

double global_trust(const SocialGraph& g, const TrustParams& p, UserId n,
                    UserId m) {
  if (n == m) throw InvalidArgument("global_trust: n == m");
  const double e = effective_direct_trust(g, p, n, m);
  const double tau = indirect_trust(g, n, m);
  return std::clamp(p.omega * e + (1.0 - p.omega) * tau, 0.0, 1.0);
}

namespace {

template <typename Closeness>
int count_neighbours(UserId n, std::span<const UserId> cluster,
                     Closeness&& closeness) {
  if (std::find(cluster.begin(), cluster.end(), n) == cluster.end()) {
    throw InvalidArgument("centrality: user not in cluster");
  }
  int degree = 0;
  for (UserId l : cluster) {
    if (l != n && closeness(n, l) > 0.0) ++degree;
  }
  return degree;
}

}  // namespace

int centrality(const SocialGraph& g, UserId n,
               std::span<const UserId> cluster) {
  return count_neighbours(n, cluster, [&](UserId a, UserId b) {
    return g.closeness(a, b);
  });
}

int centrality(const TrustTable& t, UserId n,
               std::span<const UserId> cluster) {
  return count_neighbours(n, cluster, [&](UserId a, UserId b) {
    return t.closeness(a, b);
  });
}

TrustTable::TrustTable(std::size_t n)
    : n_(n), closeness_(n * n, 0.0), alpha_(n * n, 0.0) {}

TrustTable TrustTable::build(const SocialGraph& g, const TrustParams& p,
                             std::span<const UserId> participants) {
  p.validate();
  TrustTable table(participants.size());
  table.from_interactions = g.has_interactions();
  for (std::size_t i = 0; i < participants.size(); ++i) {
    for (std::size_t j = 0; j < participants.size(); ++j) {
      if (i == j) continue;
      const UserId n = participants[i];
      const UserId m = participants[j];
      const double e = effective_direct_trust(g, p, n, m);
      const double tau = indirect_trust(g, n, m);
      table.closeness_[i * table.n_ + j] = e;
      table.alpha_[i * table.n_ + j] =
          std::clamp(p.omega * e + (1.0 - p.omega) * tau, 0.0, 1.0);
    }
  }
  return table;
}

void TrustTable::set_closeness(UserId i, UserId j, double e) {
  if (i >= n_ || j >= n_ || i == j)
    throw InvalidArgument("trust table: bad index");
  if (!(e >= 0.0 && e <= 1.0))
    throw InvalidArgument("trust table: closeness must lie in [0,1]");
  closeness_[i * n_ + j] = e;
}

void TrustTable::set_alpha(UserId i, UserId j, double a) {
  if (i >= n_ || j >= n_ || i == j)
    throw InvalidArgument("trust table: bad index");
  if (!(a >= 0.0 && a <= 1.0))
    throw InvalidArgument("trust table: alpha must lie in [0,1]");
  alpha_[i * n_ + j] = a;
}

double sample_truncated_normal(double mean, double sd, double lo, double hi,
                               std::mt19937_64& rng) {
  if (!(sd > 0.0) || !(lo < hi))
    throw InvalidArgument("truncated normal: bad parameters");
  std::normal_distribution<double> normal(mean, sd);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double x = normal(rng);
    if (x >= lo && x <= hi) return x;
  }
  // Mass inside [lo, hi] is negligible; fall back to the nearest bound.
  return std::clamp(mean, lo, hi);
}

ParsedEdgeList parse_edge_list(std::istream& in) {
  struct RawRow {
    std::int64_t u;
    std::int64_t v;
    std::optional<double> w;
  };
  std::vector<RawRow> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    RawRow row{};
    if (!(fields >> row.u >> row.v)) {
      throw LoadError("edge list: malformed line " + std::to_string(line_no));
    }
    double w = 0.0;
    if (fields >> w) {
      if (!(w >= 0.0 && w <= 1.0)) {
        throw LoadError("edge list: weight outside [0,1] on line " +
                        std::to_string(line_no));
      }
      row.w = w;
    }
    if (row.u < 0 || row.v < 0) {
      throw LoadError("edge list: negative id on line " +
                      std::to_string(line_no));
    }
    raw.push_back(row);
  }

  ParsedEdgeList out;
  for (const auto& r : raw) {
    out.original_ids.push_back(r.u);
    out.original_ids.push_back(r.v);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(
      std::unique(out.original_ids.begin(), out.original_ids.end()),
      out.original_ids.end());
  std::unordered_map<std::int64_t, UserId> dense;
  for (std::size_t i = 0; i < out.original_ids.size(); ++i) {
    dense[out.original_ids[i]] = static_cast<UserId>(i);
  }
  out.rows.reserve(raw.size());
  for (const auto& r : raw) {
    if (r.u == r.v) continue;
    out.rows.push_back({dense[r.u], dense[r.v], r.w});
  }
  return out;
}

SocialGraph build_graph(const ParsedEdgeList& edges,
                        const ClosenessSynthesis& synth, std::uint64_t seed) {
  SocialGraph g(edges.original_ids.size());
  std::mt19937_64 rng(seed);
  for (const auto& row : edges.rows) {
    if (row.weight) {
      g.set_closeness(row.u, row.v, *row.weight);
      continue;
    }
    const double forward =
        sample_truncated_normal(synth.mean, synth.sd, 0.0, 1.0, rng);
    const double backward =
        sample_truncated_normal(synth.mean, synth.sd, 0.0, 1.0, rng);
    // A draw of exactly 0 would erase the edge; keep the tie alive.
    g.set_closeness(row.u, row.v, std::max(forward, 1e-12));
    g.set_closeness(row.v, row.u, std::max(backward, 1e-12));
  }
  return g;
}

void load_interactions(std::istream& in, SocialGraph& g) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::string sign;
    double timestamp = 0.0;
    if (!(fields >> n >> m >> sign >> timestamp)) {
      // Allow a header row.
      if (line_no == 1) continue;
      throw LoadError("interactions: malformed line " +
                      std::to_string(line_no));
    }
    Interaction interaction;
    interaction.timestamp = timestamp;
    if (sign == "+" || sign == "1" || sign == "positive") {
      interaction.sign = InteractionSign::kPositive;
    } else if (sign == "-" || sign == "-1" || sign == "negative") {
      interaction.sign = InteractionSign::kNegative;
    } else {
      throw LoadError("interactions: bad sign on line " +
                      std::to_string(line_no));
    }
    if (n < 0 || m < 0 || static_cast<std::size_t>(n) >= g.size() ||
        static_cast<std::size_t>(m) >= g.size()) {
      throw LoadError("interactions: id out of range on line " +
                      std::to_string(line_no));
    }
    g.add_interaction(static_cast<UserId>(n), static_cast<UserId>(m),
                      interaction);
  }
}

}  // namespace socialfed
