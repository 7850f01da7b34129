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

#include "socialfed/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "socialfed/errors.hpp"

namespace socialfed {

namespace {

using nlohmann::json;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

enum Tag : std::uint32_t { kClosenessTag = 11, kSampleTag = 12, kEffectTag = 13 };

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key))
      throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

double get_real(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number()) throw InvalidArgument(std::string(key) + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& obj, const char* key,
                        std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number_unsigned())
    throw InvalidArgument(std::string(key) + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_text(const json& obj, const char* key,
                     const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_string()) throw InvalidArgument(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

MetricsRecord static_record(const Partition& p,
                            std::span<const Cluster> clusters) {
  MetricsRecord r;
  r.n_clusters = p.n_clusters();
  r.avg_cluster_size =
      static_cast<double>(p.n_users()) / static_cast<double>(p.n_clusters());
  const auto psi = partition_payoffs(p.n_users(), clusters);
  double sum = 0.0;
  for (double v : psi) sum += v;
  r.avg_payoff = sum / static_cast<double>(psi.size());
  return r;
}

json summarize(const ExperimentConfig& config, const SchemeResult& r,
               const GameParams& params, std::uint64_t seed) {
  const MetricsRecord last = static_record(r.partition, r.clusters);
  std::size_t multi = 0;
  for (const auto& c : r.clusters) multi += c.size() > 1 ? 1 : 0;
  std::size_t comm = 0;
  for (const auto& m : r.metrics) comm += m.comm_cost_bytes;
  return json{{"scheme", to_string(config.scheme)},
              {"seed", seed},
              {"n_users", r.partition.n_users()},
              {"n_clusters", r.partition.n_clusters()},
              {"multi_member_clusters", multi},
              {"avg_cluster_size", last.avg_cluster_size},
              {"avg_payoff", last.avg_payoff},
              {"total_utility", total_utility(r.clusters)},
              {"singleton_value", params.singleton_value()},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"comm_cost_total_bytes", comm}};
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "scfl") return Scheme::kScfl;
  if (name == "uniform_dp") return Scheme::kUniformDp;
  if (name == "non_cooperative") return Scheme::kNonCooperative;
  if (name == "social_influence") return Scheme::kSocialInfluence;
  throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kScfl: return "scfl";
    case Scheme::kUniformDp: return "uniform_dp";
    case Scheme::kNonCooperative: return "non_cooperative";
    case Scheme::kSocialInfluence: return "social_influence";
  }
  return "?";
}

SocialEffect parse_social_effect(std::string_view name) {
  if (name == "natural") return SocialEffect::kNatural;
  if (name == "strong") return SocialEffect::kStrong;
  if (name == "weak") return SocialEffect::kWeak;
  if (name == "none") return SocialEffect::kNone;
  throw InvalidArgument("unknown social effect '" + std::string(name) + "'");
}

std::string_view to_string(SocialEffect s) {
  switch (s) {
    case SocialEffect::kNatural: return "natural";
    case SocialEffect::kStrong: return "strong";
    case SocialEffect::kWeak: return "weak";
    case SocialEffect::kNone: return "none";
  }
  return "?";
}

QualityModel quality_model_by_name(std::string_view name) {
  if (name == "mnist_nll") return QualityModel::mnist_nll();
  if (name == "mnist_mse") return QualityModel::mnist_mse();
  if (name == "cifar_piecewise") return QualityModel::cifar_piecewise();
  if (name == "newsgroup_exp") return QualityModel::newsgroup_exp();
  throw InvalidArgument("unknown quality model '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (n_participants == 0) throw InvalidArgument("n_participants must be > 0");
  if (seeds.empty()) throw InvalidArgument("at least one seed is required");
  if (scheme == Scheme::kSocialInfluence &&
      (k_heads == 0 || k_heads > n_participants)) {
    throw InvalidArgument("k must lie in [1, n_participants]");
  }
  if (uniform_gamma && !(*uniform_gamma >= 0.0))
    throw InvalidArgument("uniform_gamma must be >= 0");
  if (engine.max_iter == 0) throw InvalidArgument("max_iter must be >= 1");
  if (!(graph.closeness.sd > 0.0))
    throw InvalidArgument("closeness_sd must be > 0");
  game.validate();
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc,
                 {"graph", "n_participants", "seed", "seeds", "game",
                  "quality_model", "scheme", "k", "social_effect",
                  "uniform_gamma", "max_iter", "message_bytes"},
                 "config");
  ExperimentConfig c;
  if (doc.contains("graph")) {
    const json& g = doc["graph"];
    reject_unknown(g,
                   {"edge_list", "interactions", "eval_time", "generator_seed",
                    "closeness_mean", "closeness_sd"},
                   "graph");
    c.graph.edge_list = get_text(g, "edge_list", "");
    c.graph.interactions = get_text(g, "interactions", "");
    c.graph.eval_time = get_real(g, "eval_time", 0.0);
    c.graph.generator_seed = get_count(g, "generator_seed", 0);
    c.graph.closeness.mean = get_real(g, "closeness_mean", 0.5);
    c.graph.closeness.sd = get_real(g, "closeness_sd", 0.25);
  }
  c.n_participants = get_count(doc, "n_participants", c.n_participants);
  if (doc.contains("seed") && doc.contains("seeds"))
    throw InvalidArgument("config: give either seed or seeds");
  if (doc.contains("seed")) c.seeds = {get_count(doc, "seed", 1)};
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array()) throw InvalidArgument("seeds: expected an array");
    c.seeds.clear();
    for (const auto& s : doc["seeds"]) {
      if (!s.is_number_unsigned())
        throw InvalidArgument("seeds: expected non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  c.quality_model = get_text(doc, "quality_model", c.quality_model);
  c.game.quality = quality_model_by_name(c.quality_model);
  if (doc.contains("game")) {
    const json& g = doc["game"];
    reject_unknown(g,
                   {"lambda_p", "lambda_c", "varsigma", "gamma", "omega", "nu",
                    "xi", "theta1", "theta2", "delta", "sigma_max", "alpha_th"},
                   "game");
    GameParams& p = c.game;
    p.lambda_p = get_real(g, "lambda_p", p.lambda_p);
    p.lambda_c = get_real(g, "lambda_c", p.lambda_c);
    p.head_bonus = get_real(g, "varsigma", p.head_bonus);
    p.gamma = get_real(g, "gamma", p.gamma);
    p.trust.omega = get_real(g, "omega", p.trust.omega);
    p.trust.nu = get_real(g, "nu", p.trust.nu);
    p.trust.xi = get_real(g, "xi", p.trust.xi);
    p.privacy.theta1 = get_real(g, "theta1", p.privacy.theta1);
    p.privacy.theta2 = get_real(g, "theta2", p.privacy.theta2);
    p.privacy.delta = get_real(g, "delta", p.privacy.delta);
    p.privacy.sigma_max = get_real(g, "sigma_max", p.privacy.sigma_max);
    p.privacy.alpha_th = get_real(g, "alpha_th", p.privacy.alpha_th);
  }
  c.scheme = parse_scheme(get_text(doc, "scheme", "scfl"));
  c.k_heads = get_count(doc, "k", c.k_heads);
  c.social_effect = parse_social_effect(get_text(doc, "social_effect", "natural"));
  if (doc.contains("uniform_gamma") && !doc["uniform_gamma"].is_null())
    c.uniform_gamma = get_real(doc, "uniform_gamma", 0.0);
  c.engine.max_iter = get_count(doc, "max_iter", c.engine.max_iter);
  c.engine.message_bytes = get_count(doc, "message_bytes", c.engine.message_bytes);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const GameParams& p = c.game;
  json doc{
      {"graph",
       {{"edge_list", c.graph.edge_list},
        {"interactions", c.graph.interactions},
        {"eval_time", c.graph.eval_time},
        {"generator_seed", c.graph.generator_seed},
        {"closeness_mean", c.graph.closeness.mean},
        {"closeness_sd", c.graph.closeness.sd}}},
      {"n_participants", c.n_participants},
      {"seeds", c.seeds},
      {"game",
       {{"lambda_p", p.lambda_p},
        {"lambda_c", p.lambda_c},
        {"varsigma", p.head_bonus},
        {"gamma", p.gamma},
        {"omega", p.trust.omega},
        {"nu", p.trust.nu},
        {"xi", p.trust.xi},
        {"theta1", p.privacy.theta1},
        {"theta2", p.privacy.theta2},
        {"delta", p.privacy.delta},
        {"sigma_max", p.privacy.sigma_max},
        {"alpha_th", p.privacy.alpha_th}}},
      {"quality_model", c.quality_model},
      {"scheme", to_string(c.scheme)},
      {"k", c.k_heads},
      {"social_effect", to_string(c.social_effect)},
      {"uniform_gamma", nullptr},
      {"max_iter", c.engine.max_iter},
      {"message_bytes", c.engine.message_bytes}};
  if (c.uniform_gamma) doc["uniform_gamma"] = *c.uniform_gamma;
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

ParsedEdgeList load_edges(const GraphSource& source) {
  if (source.edge_list.empty()) {
    return generate_ego_network(EgoNetworkSpec{}, source.generator_seed);
  }
  std::ifstream in(source.edge_list);
  if (!in) throw LoadError("cannot open edge list " + source.edge_list);
  return parse_edge_list(in);
}

ParticipantSample sample_participants(const SocialGraph& g, std::size_t n,
                                      std::uint64_t seed) {
  if (n > g.size()) {
    throw InvalidArgument("sample_participants: " + std::to_string(n) +
                          " requested from a graph of " +
                          std::to_string(g.size()));
  }
  std::vector<UserId> all(g.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<UserId>(i);
  ParticipantSample s;
  auto rng = stream(seed, kSampleTag);
  std::sample(all.begin(), all.end(), std::back_inserter(s.nodes), n, rng);
  std::sort(s.nodes.begin(), s.nodes.end());
  s.induced = SocialGraph(n, g.eval_time());
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : g.out_edges(s.nodes[i])) {
      auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), e.to);
      if (it != s.nodes.end() && *it == e.to) {
        s.induced.set_closeness(static_cast<UserId>(i),
                                static_cast<UserId>(it - s.nodes.begin()),
                                e.closeness);
      }
    }
  }
  return s;
}

void apply_social_effect(TrustTable& trust, SocialEffect level,
                         double alpha_th, std::uint64_t seed) {
  if (level == SocialEffect::kNatural) return;
  auto rng = stream(seed, kEffectTag);
  const double below = std::nextafter(alpha_th, 0.0);
  std::uniform_real_distribution<double> high(alpha_th, 1.0);
  std::uniform_real_distribution<double> low(0.0, alpha_th);
  const auto n = static_cast<UserId>(trust.size());
  for (UserId i = 0; i < n; ++i) {
    for (UserId j = 0; j < n; ++j) {
      if (i == j) continue;
      switch (level) {
        case SocialEffect::kStrong:
          if (trust.connected(i, j)) trust.set_alpha(i, j, high(rng));
          break;
        case SocialEffect::kWeak:
          if (trust.connected(i, j)) {
            trust.set_alpha(i, j, std::min(low(rng), below));
          } else {
            trust.set_alpha(i, j, std::min(trust.alpha(i, j), below));
          }
          break;
        case SocialEffect::kNone:
          trust.set_closeness(i, j, 0.0);
          trust.set_alpha(i, j, 0.0);
          break;
        case SocialEffect::kNatural:
          break;
      }
    }
  }
}

Instance make_instance(const ExperimentConfig& config,
                       const ParsedEdgeList& edges, std::uint64_t seed) {
  SocialGraph g =
      build_graph(edges, config.graph.closeness, stream(seed, kClosenessTag)());
  g.set_eval_time(config.graph.eval_time);
  if (!config.graph.interactions.empty()) {
    std::ifstream in(config.graph.interactions);
    if (!in) throw LoadError("cannot open interactions " + config.graph.interactions);
    load_interactions(in, g);
  }
  Instance inst;
  inst.sample = sample_participants(g, config.n_participants, seed);
  inst.trust = TrustTable::build(g, config.game.trust, inst.sample.nodes);
  apply_social_effect(inst.trust, config.social_effect,
                      config.game.privacy.alpha_th, seed);
  return inst;
}

std::vector<UserId> top_centrality(const TrustTable& trust, std::size_t k) {
  const std::size_t n = trust.size();
  std::vector<UserId> everyone(n);
  for (std::size_t i = 0; i < n; ++i) everyone[i] = static_cast<UserId>(i);
  std::vector<int> degree(n);
  for (UserId u = 0; u < n; ++u) degree[u] = centrality(trust, u, everyone);
  std::stable_sort(everyone.begin(), everyone.end(),
                   [&](UserId a, UserId b) { return degree[a] > degree[b]; });
  everyone.resize(std::min(k, n));
  std::sort(everyone.begin(), everyone.end());
  return everyone;
}

SchemeResult social_influence(const TrustTable& trust, const GameParams& params,
                              std::size_t k, std::size_t max_passes) {
  const std::size_t n = trust.size();
  const std::vector<UserId> heads = top_centrality(trust, k);
  std::vector<std::vector<UserId>> groups;
  std::vector<Cluster> evaluated;
  for (UserId h : heads) {
    groups.push_back({h});
    evaluated.push_back(build_cluster(trust, params, {h}, h));
  }
  // slot[u]: index into groups, or npos when alone.
  constexpr std::size_t kAlone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot(n, kAlone);
  for (std::size_t h = 0; h < heads.size(); ++h) slot[heads[h]] = h;
  const double solo = params.singleton_value();

  SchemeResult result;
  result.converged = false;
  MetricsRecord start;
  start.n_clusters = n;
  start.avg_cluster_size = 1.0;
  start.avg_payoff = solo;
  result.metrics.push_back(start);

  for (std::size_t pass = 1; pass <= max_passes; ++pass) {
    std::size_t moves = 0;
    for (UserId u = 0; u < n; ++u) {
      if (std::binary_search(heads.begin(), heads.end(), u)) continue;
      const std::size_t own = slot[u];
      const double current =
          own == kAlone ? solo : evaluated[own].payoff_of(u);
      std::size_t best = kAlone;
      double best_value = current + kPayoffTolerance;
      std::optional<Cluster> best_cluster;
      for (std::size_t h = 0; h < groups.size(); ++h) {
        if (h == own) continue;
        std::vector<UserId> joined = groups[h];
        joined.push_back(u);
        Cluster merged = build_cluster(trust, params, joined, heads[h]);
        const Cluster& old = evaluated[h];
        bool admissible = true;
        for (std::size_t i = 0; i < old.size() && admissible; ++i) {
          admissible = merged.payoff_of(old.members[i]) >=
                       old.payoffs[i] - kPayoffTolerance;
        }
        if (!admissible) continue;
        const double value = merged.payoff_of(u);
        if (value > best_value) {
          best_value = value;
          best = h;
          best_cluster = std::move(merged);
        }
      }
      const bool leave = best == kAlone && own != kAlone && solo > current + kPayoffTolerance;
      if (best == kAlone && !leave) continue;
      if (own != kAlone) {
        std::erase(groups[own], u);
        evaluated[own] = build_cluster(trust, params, groups[own], heads[own]);
      }
      slot[u] = best;
      if (best != kAlone) {
        groups[best].push_back(u);
        evaluated[best] = std::move(*best_cluster);
      }
      ++moves;
    }
    std::vector<std::vector<UserId>> blocks = groups;
    for (UserId u = 0; u < n; ++u) {
      if (slot[u] == kAlone) blocks.push_back({u});
    }
    result.partition = Partition::from_clusters(n, std::move(blocks));
    result.iterations = pass;
    MetricsRecord r;
    result.clusters.clear();
    for (const auto& members : result.partition.clusters()) {
      std::optional<UserId> head;
      if (slot[members.front()] != kAlone) head = heads[slot[members.front()]];
      result.clusters.push_back(build_cluster(trust, params, members, head));
    }
    r = static_record(result.partition, result.clusters);
    r.iteration = pass;
    r.n_transfers = moves;
    r.n_requests = moves;
    result.metrics.push_back(r);
    if (moves == 0) {
      result.converged = true;
      break;
    }
  }
  result.payoffs = partition_payoffs(n, result.clusters);
  return result;
}

SchemeResult run_scheme(const ExperimentConfig& config, const TrustTable& trust,
                        std::uint64_t seed) {
  config.validate();
  GameParams params = config.game;
  SchemeResult r;
  switch (config.scheme) {
    case Scheme::kScfl: {
      RunResult run = run_to_stable(trust, params,
                                    Partition::singletons(trust.size()),
                                    config.engine);
      r.partition = std::move(run.partition);
      r.clusters = std::move(run.clusters);
      r.payoffs = std::move(run.payoffs);
      r.metrics = std::move(run.metrics);
      r.converged = run.converged;
      r.iterations = run.iterations;
      break;
    }
    case Scheme::kUniformDp:
      if (config.uniform_gamma) params.gamma = *config.uniform_gamma;
      [[fallthrough]];
    case Scheme::kNonCooperative: {
      r.partition = Partition::singletons(trust.size());
      r.clusters = evaluate_partition(trust, params, r.partition);
      r.payoffs = partition_payoffs(trust.size(), r.clusters);
      r.metrics.push_back(static_record(r.partition, r.clusters));
      break;
    }
    case Scheme::kSocialInfluence:
      r = social_influence(trust, params, config.k_heads, config.engine.max_iter);
      break;
  }
  r.summary = summarize(config, r, params, seed);
  return r;
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("sha1: no digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha1: digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

RunFiles run_and_write(const ExperimentConfig& config,
                       const ParsedEdgeList& edges, std::uint64_t seed,
                       const std::filesystem::path& dir,
                       SchemeResult* result_out) {
  const Instance inst = make_instance(config, edges, seed);
  SchemeResult r = run_scheme(config, inst.trust, seed);

  std::filesystem::create_directories(dir);
  std::map<std::string, std::string> outputs;
  json partition = partition_to_json(r.clusters, r.iterations, r.converged);
  partition["nodes"] = inst.sample.nodes;
  outputs["partition.json"] = partition.dump(2) + "\n";
  std::ostringstream metrics;
  metrics << std::setprecision(12);
  write_metrics_csv(metrics, r.metrics);
  outputs["metrics.csv"] = metrics.str();
  outputs["summary.json"] = r.summary.dump(2) + "\n";

  json inputs;
  const std::string config_text = config_to_json(config).dump();
  inputs["config"] = git_blob_hash(config_text);
  if (config.graph.edge_list.empty()) {
    std::ostringstream text;
    write_edge_list(text, edges);
    inputs["edge_list"] = git_blob_hash(text.str());
  } else {
    inputs["edge_list"] = git_blob_hash(read_file(config.graph.edge_list));
  }
  if (!config.graph.interactions.empty())
    inputs["interactions"] = git_blob_hash(read_file(config.graph.interactions));

  RunFiles files;
  files.dir = dir;
  files.manifest = json{{"config", config_to_json(config)},
                        {"seed", seed},
                        {"inputs", inputs},
                        {"outputs", json::object()}};
  for (const auto& [name, text] : outputs) {
    write_file(dir / name, text);
    files.manifest["outputs"][name] = git_blob_hash(text);
  }
  write_file(dir / "manifest.json", files.manifest.dump(2) + "\n");
  if (result_out != nullptr) *result_out = std::move(r);
  return files;
}

std::vector<json> run_sweep(const ExperimentConfig& config,
                            const std::filesystem::path& root,
                            std::size_t workers) {
  config.validate();
  const ParsedEdgeList edges = load_edges(config.graph);
  const std::size_t n_runs = config.seeds.size();
  std::vector<json> summaries(n_runs);
  std::vector<std::exception_ptr> errors(n_runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_runs; i = next++) {
      try {
        SchemeResult r;
        const std::uint64_t seed = config.seeds[i];
        run_and_write(config, edges, seed, root / ("seed_" + std::to_string(seed)),
                      &r);
        summaries[i] = r.summary;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, n_runs));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return summaries;
}

std::filesystem::path output_root(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("SOCIALFED_OUTPUT_ROOT"); env && *env)
    return env;
  return fallback;
}

}  // namespace socialfed
