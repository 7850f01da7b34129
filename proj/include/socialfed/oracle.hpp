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
#include <optional>
#include <span>
#include <vector>

#include "socialfed/federation_game.hpp"

namespace socialfed {

inline constexpr std::size_t kMaxEnumerationUsers = 12;

// Walks every set partition of [0, n) once, in restricted-growth-string
// order: labels()[i] is the block of element i, and each label is at most one
// more than the largest label before it.
class SetPartitionEnumerator {
 public:
  // Throws SizeGuard for n > kMaxEnumerationUsers.
  explicit SetPartitionEnumerator(std::size_t n);

  std::span<const std::uint8_t> labels() const { return labels_; }
  std::vector<std::vector<UserId>> blocks() const;
  // Advances to the next partition; false once exhausted.
  bool next();

 private:
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint8_t> prefix_max_;
};

std::uint64_t count_partitions(std::size_t n);

// Bell numbers from the Bell triangle.
std::uint64_t bell_number(std::size_t n);

struct OptimalPartition {
  Partition partition;
  double total_utility = 0.0;
};

// Maximizes the sum of federal utilities; ties go to enumeration order.
OptimalPartition optimal_partition(const TrustTable& trust,
                                   const GameParams& params);

struct StabilityReport {
  bool stable = true;
  // First strictly improving admissible deviation found.
  std::optional<UserId> user;
  std::optional<std::size_t> target;  // nullopt with a user: go alone
  double current = 0.0;
  double deviation = 0.0;
};

// Scans every user against every other cluster and the singleton option.
// Histories are ignored unless given.
StabilityReport is_nash_stable(const TrustTable& trust,
                               const GameParams& params,
                               const Partition& partition,
                               std::span<const History> histories = {});

struct GrandCoalitionReport {
  bool unstable = false;
  std::optional<UserId> witness;
  double payoff_in_grand = 0.0;
  double singleton_value = 0.0;
};

// Checks whether some member of the all-user cluster gains by leaving.
GrandCoalitionReport grand_coalition_unstable(const TrustTable& trust,
                                              const GameParams& params);

}  // namespace socialfed
