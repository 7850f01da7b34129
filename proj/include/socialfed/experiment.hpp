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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "socialfed/ego_network.hpp"
#include "socialfed/federation_game.hpp"
#include "socialfed/matching_engine.hpp"

namespace socialfed {

enum class Scheme { kScfl, kUniformDp, kNonCooperative, kSocialInfluence };
// kNatural keeps the synthesized trust untouched.
enum class SocialEffect { kNatural, kStrong, kWeak, kNone };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);
SocialEffect parse_social_effect(std::string_view name);
std::string_view to_string(SocialEffect s);

// Named coefficient sets: mnist_nll, mnist_mse, cifar_piecewise,
// newsgroup_exp.
QualityModel quality_model_by_name(std::string_view name);

struct GraphSource {
  std::string edge_list;  // empty: synthetic ego network
  std::string interactions;  // optional CSV n,m,sign,timestamp
  double eval_time = 0.0;
  std::uint64_t generator_seed = 0;
  ClosenessSynthesis closeness{};
};

struct ExperimentConfig {
  GraphSource graph{};
  std::size_t n_participants = 100;
  std::vector<std::uint64_t> seeds{1};
  GameParams game{};
  std::string quality_model = "mnist_nll";
  Scheme scheme = Scheme::kScfl;
  std::size_t k_heads = 10;  // social_influence only
  SocialEffect social_effect = SocialEffect::kNatural;
  std::optional<double> uniform_gamma;  // uniform_dp only
  EngineOptions engine{};

  void validate() const;
};

// Unknown keys and bad values throw InvalidArgument.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

// Edge list from the file named in `source`, or the synthetic stand-in.
ParsedEdgeList load_edges(const GraphSource& source);

struct ParticipantSample {
  std::vector<UserId> nodes;  // sorted graph ids; participant i is nodes[i]
  SocialGraph induced;        // edges among the sampled nodes only
};

// Uniform sample without replacement.
ParticipantSample sample_participants(const SocialGraph& g, std::size_t n,
                                      std::uint64_t seed);

// strong: connected pairs get alpha ~ U[alpha_th, 1].
// weak: connected pairs get alpha ~ U[0, alpha_th); all alphas end < alpha_th.
// none: every closeness and alpha is zeroed.
void apply_social_effect(TrustTable& trust, SocialEffect level,
                         double alpha_th, std::uint64_t seed);

// Trust table of the participants of one seeded instance.
struct Instance {
  ParticipantSample sample;
  TrustTable trust;
};

Instance make_instance(const ExperimentConfig& config,
                       const ParsedEdgeList& edges, std::uint64_t seed);

// Top-k users by centrality over all participants, ties to the lower id.
std::vector<UserId> top_centrality(const TrustTable& trust, std::size_t k);

struct SchemeResult {
  Partition partition;
  std::vector<Cluster> clusters;
  std::vector<double> payoffs;
  std::vector<MetricsRecord> metrics;
  bool converged = true;
  std::size_t iterations = 0;
  nlohmann::json summary;
};

SchemeResult run_scheme(const ExperimentConfig& config, const TrustTable& trust,
                        std::uint64_t seed);

// Repeated greedy passes: each non-head user, in id order, moves to the
// admissible head cluster that strictly raises its payoff the most. The
// heads stay fixed.
SchemeResult social_influence(const TrustTable& trust, const GameParams& params,
                              std::size_t k, std::size_t max_passes);

// SHA-1 over "blob <size>\0<content>", hex encoded.
std::string git_blob_hash(std::string_view content);

struct RunFiles {
  std::filesystem::path dir;
  nlohmann::json manifest;
};

// Runs one seed and writes partition.json, metrics.csv, summary.json and
// manifest.json into `dir`.
RunFiles run_and_write(const ExperimentConfig& config,
                       const ParsedEdgeList& edges, std::uint64_t seed,
                       const std::filesystem::path& dir,
                       SchemeResult* result_out = nullptr);

// Runs every config seed on a pool of `workers` threads, one directory per
// seed under `root`. Returns summaries ordered as config.seeds.
std::vector<nlohmann::json> run_sweep(const ExperimentConfig& config,
                                      const std::filesystem::path& root,
                                      std::size_t workers);

// Output root: SOCIALFED_OUTPUT_ROOT if set, else `fallback`.
std::filesystem::path output_root(const std::filesystem::path& fallback);

}  // namespace socialfed
