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

// socialfed command line: run, sweep, oracle, flsim, validate, export-graph.
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 non-convergence,
// 4 oracle violation.

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "socialfed/errors.hpp"
#include "socialfed/experiment.hpp"
#include "socialfed/fl_pipeline.hpp"
#include "socialfed/matching_engine.hpp"
#include "socialfed/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socialfed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitOracle = 4;

// Command-line overrides, applied on top of the config file as JSON keys.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> edge_list, interactions, quality_model, scheme,
      social_effect;
  std::optional<double> eval_time, closeness_mean, closeness_sd, uniform_gamma;
  std::optional<std::size_t> generator_seed, n, k, max_iter, message_bytes;
  std::vector<std::uint64_t> seeds;
  std::optional<double> lambda_p, lambda_c, varsigma, gamma, omega, nu, xi,
      theta1, theta2, delta, sigma_max, alpha_th;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config file");
    app->add_option("--edge-list", edge_list, "edge list path (default: synthetic)");
    app->add_option("--interactions", interactions, "interaction CSV n,m,sign,timestamp");
    app->add_option("--eval-time", eval_time);
    app->add_option("--generator-seed", generator_seed);
    app->add_option("--closeness-mean", closeness_mean);
    app->add_option("--closeness-sd", closeness_sd);
    app->add_option("-n,--n-participants", n);
    app->add_option("--seed,--seeds", seeds, "one or more seeds");
    app->add_option("--quality-model", quality_model,
                    "mnist_nll, mnist_mse, cifar_piecewise, newsgroup_exp");
    app->add_option("--scheme", scheme,
                    "scfl, uniform_dp, non_cooperative, social_influence");
    app->add_option("-k,--heads", k, "heads for social_influence");
    app->add_option("--social-effect", social_effect, "natural, strong, weak, none");
    app->add_option("--uniform-gamma", uniform_gamma, "gamma for uniform_dp");
    app->add_option("--max-iter", max_iter);
    app->add_option("--message-bytes", message_bytes);
    app->add_option("--lambda-p", lambda_p);
    app->add_option("--lambda-c", lambda_c);
    app->add_option("--varsigma", varsigma, "head bonus");
    app->add_option("--gamma", gamma, "non-IID degree");
    app->add_option("--omega", omega);
    app->add_option("--nu", nu);
    app->add_option("--xi", xi);
    app->add_option("--theta1", theta1);
    app->add_option("--theta2", theta2);
    app->add_option("--delta", delta);
    app->add_option("--sigma-max", sigma_max);
    app->add_option("--alpha-th", alpha_th);
  }

  ExperimentConfig resolve() const {
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw LoadError("cannot open config " + config_path);
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
      }
    }
    auto put = [](json& node, const char* key, const auto& v) {
      if (v) node[key] = *v;
    };
    json& g = doc["graph"];
    if (g.is_null()) g = json::object();
    put(g, "edge_list", edge_list);
    put(g, "interactions", interactions);
    put(g, "eval_time", eval_time);
    put(g, "generator_seed", generator_seed);
    put(g, "closeness_mean", closeness_mean);
    put(g, "closeness_sd", closeness_sd);
    json& p = doc["game"];
    if (p.is_null()) p = json::object();
    put(p, "lambda_p", lambda_p);
    put(p, "lambda_c", lambda_c);
    put(p, "varsigma", varsigma);
    put(p, "gamma", gamma);
    put(p, "omega", omega);
    put(p, "nu", nu);
    put(p, "xi", xi);
    put(p, "theta1", theta1);
    put(p, "theta2", theta2);
    put(p, "delta", delta);
    put(p, "sigma_max", sigma_max);
    put(p, "alpha_th", alpha_th);
    put(doc, "n_participants", n);
    put(doc, "quality_model", quality_model);
    put(doc, "scheme", scheme);
    put(doc, "k", k);
    put(doc, "social_effect", social_effect);
    put(doc, "uniform_gamma", uniform_gamma);
    put(doc, "max_iter", max_iter);
    put(doc, "message_bytes", message_bytes);
    if (!seeds.empty()) {
      doc.erase("seed");
      doc["seeds"] = seeds;
    }
    return config_from_json(doc);
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LoadError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int replay(const fs::path& manifest_path, fs::path out) {
  const json manifest = json::parse(read_file(manifest_path));
  if (!manifest.contains("config") || !manifest.contains("seed")) {
    throw LoadError("manifest: missing config or seed");
  }
  const ExperimentConfig config = config_from_json(manifest["config"]);
  const std::uint64_t seed = manifest["seed"].get<std::uint64_t>();
  if (out.empty()) out = manifest_path.parent_path() / "replay";
  const ParsedEdgeList edges = load_edges(config.graph);
  const RunFiles files = run_and_write(config, edges, seed, out);
  int mismatches = 0;
  for (const auto& [name, hash] : manifest["outputs"].items()) {
    const std::string now = files.manifest["outputs"].value(name, "");
    if (now != hash.get<std::string>()) {
      std::cerr << "mismatch: " << name << "\n";
      ++mismatches;
    }
  }
  if (files.manifest["inputs"] != manifest["inputs"]) {
    std::cerr << "mismatch: inputs differ from the recorded hashes\n";
    ++mismatches;
  }
  std::cout << (mismatches == 0 ? "reproduced " : "differs ") << out.string() << "\n";
  return mismatches == 0 ? kExitOk : kExitFailure;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-aware clustered federated learning simulator"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string out;
  std::string manifest;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  bool with_history = false;
  bool grand = false;
  bool baseline = false;
  std::string partition_path;
  std::string trace_path;
  FlOptions fl;
  TaskSpec task_spec;

  CLI::App* run = app.add_subcommand("run", "run one experiment per seed");
  flags.attach(run);
  run->add_option("-o,--out", out,
                  "output directory (default $SOCIALFED_OUTPUT_ROOT or runs)");
  run->add_option("--manifest", manifest, "re-run a manifest.json and compare hashes");

  CLI::App* sweep = app.add_subcommand("sweep", "run every seed on a worker pool");
  flags.attach(sweep);
  sweep->add_option("-o,--out", out, "output root");
  sweep->add_option("-j,--workers", workers, "worker threads (default: hardware)");

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force checks on small instances");
  flags.attach(oracle);
  oracle->add_flag("--with-history", with_history,
                   "count rejection histories in the stability check");
  oracle->add_flag("--grand", grand, "only test whether the grand coalition is unstable");

  CLI::App* flsim = app.add_subcommand("flsim", "federated rounds on the synthetic task");
  flags.attach(flsim);
  flsim->add_option("--rounds", fl.rounds);
  flsim->add_option("--eta", fl.eta);
  flsim->add_option("--epochs", fl.epochs);
  flsim->add_option("--batch", fl.batch, "0 = full batch");
  flsim->add_option("--clip", fl.clip_norm);
  flsim->add_option("--dim", task_spec.dim);
  flsim->add_option("--dirichlet-gamma", task_spec.dirichlet.gamma);
  flsim->add_flag("--baseline", baseline, "all singletons at sigma_max instead of the scheme");
  flsim->add_option("--trace", trace_path, "write round,test_loss,global_model_norm CSV");

  CLI::App* validate = app.add_subcommand("validate", "audit a saved partition");
  flags.attach(validate);
  validate->add_option("-p,--partition", partition_path, "partition.json")->required();

  CLI::App* export_graph = app.add_subcommand("export-graph", "write the synthetic edge list");
  export_graph->add_option("--generator-seed", flags.generator_seed);
  export_graph->add_option("-o,--out", out, "edge list path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      if (!manifest.empty()) return replay(manifest, out);
      const ExperimentConfig config = flags.resolve();
      const ParsedEdgeList edges = load_edges(config.graph);
      const fs::path root = out.empty() ? output_root("runs") : fs::path(out);
      bool converged = true;
      for (std::uint64_t seed : config.seeds) {
        const fs::path dir =
            config.seeds.size() == 1 && !out.empty() ? root : root / ("seed_" + std::to_string(seed));
        SchemeResult result;
        run_and_write(config, edges, seed, dir, &result);
        print(result.summary);
        converged = converged && result.converged;
      }
      return converged ? kExitOk : kExitNotConverged;
    }

    if (*sweep) {
      const ExperimentConfig config = flags.resolve();
      const fs::path root = out.empty() ? output_root("runs") : fs::path(out);
      const auto summaries = run_sweep(config, root, workers);
      bool converged = true;
      for (const json& s : summaries) converged = converged && s.value("converged", false);
      print(json(summaries));
      return converged ? kExitOk : kExitNotConverged;
    }

    if (*oracle) {
      const ExperimentConfig config = flags.resolve();
      const ParsedEdgeList edges = load_edges(config.graph);
      bool violated = false;
      json report = json::array();
      for (std::uint64_t seed : config.seeds) {
        const Instance inst = make_instance(config, edges, seed);
        json r{{"seed", seed}};
        if (grand) {
          const GrandCoalitionReport g = grand_coalition_unstable(inst.trust, config.game);
          r["grand_unstable"] = g.unstable;
          if (g.witness) r["witness"] = *g.witness;
          r["payoff_in_grand"] = g.payoff_in_grand;
          r["singleton_value"] = g.singleton_value;
        } else {
          if (inst.trust.size() > kMaxEnumerationUsers) {
            throw SizeGuard("oracle: at most " + std::to_string(kMaxEnumerationUsers) +
                            " participants");
          }
          const RunResult engine = run_to_stable(inst.trust, config.game,
                                                 Partition::singletons(inst.trust.size()),
                                                 config.engine);
          const StabilityReport st =
              with_history ? is_nash_stable(inst.trust, config.game, engine.partition,
                                            engine.histories)
                           : is_nash_stable(inst.trust, config.game, engine.partition);
          const OptimalPartition best = optimal_partition(inst.trust, config.game);
          const double engine_total = total_utility(engine.clusters);
          r["converged"] = engine.converged;
          r["nash_stable"] = st.stable;
          if (!st.stable) {
            r["witness_user"] = *st.user;
            r["witness_target"] = st.target ? json(*st.target) : json("alone");
          }
          r["engine_total"] = engine_total;
          r["optimal_total"] = best.total_utility;
          violated = violated || !st.stable || best.total_utility < engine_total - 1e-9;
        }
        report.push_back(std::move(r));
      }
      print(report);
      return violated ? kExitOracle : kExitOk;
    }

    if (*flsim) {
      const ExperimentConfig config = flags.resolve();
      const ParsedEdgeList edges = load_edges(config.graph);
      const std::uint64_t seed = config.seeds.front();
      const Instance inst = make_instance(config, edges, seed);
      std::vector<Cluster> clusters;
      if (baseline) {
        clusters = evaluate_partition(inst.trust, config.game,
                                      Partition::singletons(inst.trust.size()));
      } else {
        clusters = run_scheme(config, inst.trust, seed).clusters;
      }
      task_spec.n_users = inst.trust.size();
      const SyntheticTask task = make_task(task_spec, seed);
      const FlResult r = run_rounds(task, clusters, fl, seed);
      if (!trace_path.empty()) {
        std::ofstream csv(trace_path);
        if (!csv) throw LoadError("cannot write " + trace_path);
        write_round_trace_csv(csv, r.trace);
      }
      print(json{{"seed", seed},
                 {"clusters", clusters.size()},
                 {"final_test_loss", r.trace.back().test_loss},
                 {"global_model_norm", r.trace.back().global_model_norm}});
      return kExitOk;
    }

    if (*validate) {
      const ExperimentConfig config = flags.resolve();
      const ParsedEdgeList edges = load_edges(config.graph);
      const Instance inst = make_instance(config, edges, config.seeds.front());
      const json doc = json::parse(read_file(partition_path));
      const Partition part = partition_from_json(doc, inst.trust.size());
      const auto clusters = evaluate_partition(inst.trust, config.game, part);
      double worst_sum = 0.0;
      double worst_ir = 0.0;
      for (const Cluster& c : clusters) {
        double s = 0.0;
        for (double v : c.payoffs) {
          s += v;
          worst_ir = std::max(worst_ir, config.game.singleton_value() - v);
        }
        worst_sum = std::max(worst_sum, std::abs(s - c.utility));
      }
      const StabilityReport st = is_nash_stable(inst.trust, config.game, part);
      json r{{"clusters", clusters.size()},
             {"nash_stable", st.stable},
             {"max_conservation_error", worst_sum},
             {"max_rationality_shortfall", worst_ir}};
      if (!st.stable) {
        r["witness_user"] = *st.user;
        r["witness_target"] = st.target ? json(*st.target) : json("alone");
      }
      print(r);
      const bool ok = st.stable && worst_sum <= 1e-9 && worst_ir <= 1e-9;
      return ok ? kExitOk : kExitOracle;
    }

    if (*export_graph) {
      EgoNetworkSpec spec;
      const ParsedEdgeList edges =
          generate_ego_network(spec, flags.generator_seed.value_or(0));
      std::ofstream file(out);
      if (!file) throw LoadError("cannot write " + out);
      write_edge_list(file, edges);
      std::cout << edges.rows.size() << " edges over " << edges.original_ids.size()
                << " nodes written to " << out << "\n";
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LoadError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SizeGuard& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
