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

#include "socialfed/fl_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "socialfed/errors.hpp"

namespace socialfed {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

enum Tag : std::uint64_t { kTaskTag = 1, kTrainTag = 2, kNoiseTag = 3 };

void append_sample(LocalData& data, const SyntheticTask& task,
                   std::span<const double> mean, double label_noise,
                   std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  double y = 0.0;
  for (std::size_t j = 0; j < task.dim; ++j) {
    const double x = mean[j] + z(rng);
    data.features.push_back(x);
    y += task.truth[j] * x;
  }
  data.targets.push_back(y + label_noise * z(rng));
}

double dot(const double* x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += x[j] * w[j];
  return s;
}

}  // namespace

void TaskSpec::validate() const {
  if (dim == 0) throw InvalidArgument("task: dim must be > 0");
  if (n_users == 0) throw InvalidArgument("task: n_users must be > 0");
  if (samples_per_class == 0)
    throw InvalidArgument("task: samples_per_class must be > 0");
  if (test_samples == 0) throw InvalidArgument("task: test_samples must be > 0");
  if (!(label_noise >= 0.0))
    throw InvalidArgument("task: label_noise must be >= 0");
  if (!(class_shift >= 0.0))
    throw InvalidArgument("task: class_shift must be >= 0");
  dirichlet.validate();
}

SyntheticTask make_task(const TaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto rng = stream(seed, 0, 0, kTaskTag);
  std::normal_distribution<double> z(0.0, 1.0);

  SyntheticTask task;
  task.dim = spec.dim;
  task.truth.resize(spec.dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
  for (double& w : task.truth) w = scale * z(rng);

  const std::size_t n_classes = spec.dirichlet.n_classes;
  std::vector<ModelVector> means(n_classes, ModelVector(spec.dim));
  for (auto& m : means) {
    for (double& v : m) v = z(rng);
    const double norm = l2_norm(m);
    for (double& v : m) v *= spec.class_shift / norm;
  }

  const ClassCounts counts = dirichlet_partition(
      spec.dirichlet, spec.n_users, spec.samples_per_class, rng());
  task.users.resize(spec.n_users);
  std::uniform_int_distribution<std::size_t> pick(0, n_classes - 1);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      for (std::size_t i = 0; i < counts[u][c]; ++i) {
        append_sample(task.users[u], task, means[c], spec.label_noise, rng);
      }
    }
    if (task.users[u].rows() == 0) {
      append_sample(task.users[u], task, means[pick(rng)], spec.label_noise,
                    rng);
    }
  }
  for (std::size_t i = 0; i < spec.test_samples; ++i) {
    append_sample(task.test, task, means[i % n_classes], spec.label_noise,
                  rng);
  }
  return task;
}

double mse(const LocalData& data, std::span<const double> model) {
  if (data.rows() == 0) throw InvalidArgument("mse: empty dataset");
  const std::size_t d = model.size();
  double s = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double r = dot(&data.features[i * d], model) - data.targets[i];
    s += r * r;
  }
  return s / static_cast<double>(data.rows());
}

double l2_norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

ModelVector local_train(const SyntheticTask& task, UserId user,
                        std::span<const double> global_model, double eta,
                        std::size_t epochs, std::size_t batch,
                        std::uint64_t seed) {
  if (!(eta >= 0.0)) throw InvalidArgument("local_train: eta must be >= 0");
  if (user >= task.users.size())
    throw InvalidArgument("local_train: unknown user");
  if (global_model.size() != task.dim)
    throw InvalidArgument("local_train: model dimension mismatch");
  const LocalData& data = task.users[user];
  const std::size_t rows = data.rows();
  if (rows == 0) {
    throw InvalidArgument("local_train: user " + std::to_string(user) +
                          " has no data");
  }
  const std::size_t d = task.dim;
  const std::size_t b = (batch == 0 || batch > rows) ? rows : batch;

  ModelVector w(global_model.begin(), global_model.end());
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  ModelVector grad(d);
  for (std::size_t e = 0; e < epochs; ++e) {
    if (b < rows) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < rows; start += b) {
      const std::size_t end = std::min(rows, start + b);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const double* x = &data.features[order[k] * d];
        const double r = dot(x, w) - data.targets[order[k]];
        for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t j = 0; j < d; ++j) w[j] -= eta * grad[j] * inv;
    }
  }
  return w;
}

double sampling_rate(const SyntheticTask& task, UserId user,
                     std::size_t batch) {
  if (user >= task.users.size())
    throw InvalidArgument("sampling_rate: unknown user");
  const double rows = static_cast<double>(task.users[user].rows());
  if (batch == 0) return 1.0;
  return std::min(1.0, static_cast<double>(batch) / rows);
}

ModelVector sanitize(std::span<const double> update, double sigma,
                     double clip_norm, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sanitize: sigma must be >= 0");
  if (!(clip_norm > 0.0))
    throw InvalidArgument("sanitize: clip norm must be > 0");
  ModelVector out(update.begin(), update.end());
  const double norm = l2_norm(out);
  if (norm > clip_norm) {
    for (double& v : out) v *= clip_norm / norm;
  }
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    for (double& v : out) v += sigma * clip_norm * z(rng);
  }
  return out;
}

ClusterAggregate intra_cluster_aggregate(
    const Cluster& cluster, const std::map<UserId, ModelVector>& updates) {
  ClusterAggregate agg;
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    auto it = updates.find(cluster.members[i]);
    if (it == updates.end()) {
      throw InvalidArgument("intra_cluster_aggregate: no update for user " +
                            std::to_string(cluster.members[i]));
    }
    const ModelVector& v = it->second;
    if (agg.weighted_sum.empty()) agg.weighted_sum.assign(v.size(), 0.0);
    if (v.size() != agg.weighted_sum.size())
      throw InvalidArgument("intra_cluster_aggregate: dimension mismatch");
    const double q = cluster.qualities[i];
    for (std::size_t j = 0; j < v.size(); ++j) agg.weighted_sum[j] += q * v[j];
    agg.total_quality += q;
  }
  return agg;
}

ModelVector global_aggregate(std::span<const ClusterAggregate> clusters) {
  if (clusters.empty()) throw InvalidArgument("global_aggregate: no clusters");
  const std::size_t d = clusters.front().weighted_sum.size();
  ModelVector sum(d, 0.0);
  double total = 0.0;
  for (const auto& c : clusters) {
    if (c.weighted_sum.size() != d)
      throw InvalidArgument("global_aggregate: dimension mismatch");
    for (std::size_t j = 0; j < d; ++j) sum[j] += c.weighted_sum[j];
    total += c.total_quality;
  }
  if (!(total > 0.0)) {
    throw DegenerateConfig("global_aggregate: total quality must be > 0");
  }
  for (double& v : sum) v /= total;
  return sum;
}

FlResult run_rounds(const SyntheticTask& task, std::span<const Cluster> clusters,
                    const FlOptions& options, std::uint64_t seed) {
  if (options.rounds < 1) throw InvalidArgument("run_rounds: rounds must be >= 1");
  if (clusters.empty()) throw InvalidArgument("run_rounds: no clusters");
  FlResult result;
  result.model.assign(task.dim, 0.0);
  for (std::size_t r = 1; r <= options.rounds; ++r) {
    std::vector<ClusterAggregate> outputs;
    outputs.reserve(clusters.size());
    for (const Cluster& c : clusters) {
      std::map<UserId, ModelVector> updates;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const UserId u = c.members[i];
        ModelVector local =
            local_train(task, u, result.model, options.eta, options.epochs,
                        options.batch, stream(seed, r, u, kTrainTag)());
        if (c.sigmas[i] > 0.0) {
          for (std::size_t j = 0; j < task.dim; ++j) local[j] -= result.model[j];
          ModelVector noised = sanitize(local, c.sigmas[i], options.clip_norm,
                                        stream(seed, r, u, kNoiseTag)());
          for (std::size_t j = 0; j < task.dim; ++j)
            noised[j] += result.model[j];
          local = std::move(noised);
        }
        updates.emplace(u, std::move(local));
      }
      outputs.push_back(intra_cluster_aggregate(c, updates));
    }
    result.model = global_aggregate(outputs);
    result.trace.push_back(
        {r, mse(task.test, result.model), l2_norm(result.model)});
  }
  return result;
}

void write_round_trace_csv(std::ostream& out,
                           std::span<const RoundRecord> trace) {
  out << "round,test_loss,global_model_norm\n";
  for (const auto& r : trace) {
    out << r.round << ',' << r.test_loss << ',' << r.global_model_norm << '\n';
  }
}

}  // namespace socialfed
