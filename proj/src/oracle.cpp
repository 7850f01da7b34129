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

#include "socialfed/oracle.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "socialfed/errors.hpp"

namespace socialfed {

namespace {

void guard(std::size_t n) {
  if (n > kMaxEnumerationUsers) {
    throw SizeGuard("brute force refused for " + std::to_string(n) +
                    " users (limit " + std::to_string(kMaxEnumerationUsers) +
                    ")");
  }
}

}  // namespace

SetPartitionEnumerator::SetPartitionEnumerator(std::size_t n)
    : labels_(n, 0), prefix_max_(n, 0) {
  guard(n);
}

std::vector<std::vector<UserId>> SetPartitionEnumerator::blocks() const {
  std::vector<std::vector<UserId>> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= out.size()) out.resize(labels_[i] + 1);
    out[labels_[i]].push_back(static_cast<UserId>(i));
  }
  return out;
}

bool SetPartitionEnumerator::next() {
  // prefix_max_[i] is the largest label among positions [0, i).
  const std::size_t n = labels_.size();
  if (n <= 1) return false;
  for (std::size_t i = n - 1; i >= 1; --i) {
    if (labels_[i] <= prefix_max_[i]) {
      ++labels_[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        labels_[j] = 0;
        prefix_max_[j] = std::max(prefix_max_[j - 1], labels_[j - 1]);
      }
      return true;
    }
  }
  return false;
}

std::uint64_t count_partitions(std::size_t n) {
  SetPartitionEnumerator e(n);
  std::uint64_t count = 1;
  while (e.next()) ++count;
  return count;
}

std::uint64_t bell_number(std::size_t n) {
  // Row r of the triangle starts with the last entry of row r-1.
  std::vector<std::uint64_t> row{1};
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

OptimalPartition optimal_partition(const TrustTable& trust,
                                   const GameParams& params) {
  const std::size_t n = trust.size();
  guard(n);
  std::unordered_map<std::uint32_t, double> utility_of;
  auto utility = [&](const std::vector<UserId>& members) {
    std::uint32_t mask = 0;
    for (UserId u : members) mask |= 1u << u;
    auto it = utility_of.find(mask);
    if (it != utility_of.end()) return it->second;
    const double v = build_cluster(trust, params, members).utility;
    utility_of.emplace(mask, v);
    return v;
  };

  SetPartitionEnumerator e(n);
  std::vector<std::vector<UserId>> best_blocks;
  double best = kRejected;
  do {
    const auto blocks = e.blocks();
    double total = 0.0;
    for (const auto& b : blocks) total += utility(b);
    if (total > best) {
      best = total;
      best_blocks = blocks;
    }
  } while (e.next());
  return {Partition::from_clusters(n, std::move(best_blocks)), best};
}

StabilityReport is_nash_stable(const TrustTable& trust,
                               const GameParams& params,
                               const Partition& partition,
                               std::span<const History> histories) {
  const auto evaluated = evaluate_partition(trust, params, partition);
  StabilityReport report;
  for (UserId u = 0; u < partition.n_users(); ++u) {
    const History* history = histories.empty() ? nullptr : &histories[u];
    const auto options =
        transferable_set(trust, params, u, partition, evaluated, history);
    if (options.empty()) continue;
    report.stable = false;
    report.user = u;
    report.target = options.front().cluster;
    report.current = evaluated[partition.cluster_of(u)].payoff_of(u);
    report.deviation = options.front().value;
    return report;
  }
  return report;
}

GrandCoalitionReport grand_coalition_unstable(const TrustTable& trust,
                                              const GameParams& params) {
  if (trust.size() < 2) {
    throw InvalidArgument("grand coalition check needs at least two users");
  }
  const Partition grand = Partition::grand(trust.size());
  GrandCoalitionReport report;
  report.singleton_value = params.singleton_value();
  const StabilityReport s = is_nash_stable(trust, params, grand);
  if (!s.stable) {
    report.unstable = true;
    report.witness = s.user;
    report.payoff_in_grand = s.current;
  }
  return report;
}

}  // namespace socialfed
