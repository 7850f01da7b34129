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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socialfed {

enum class LossVariant { kSigmoid3D, kPiecewisePoly, kExpFit };

// Analytic surrogate for the trained-model loss as a function of the noise
// scale sigma and the Dirichlet concentration gamma, plus the affine map from
// loss to model quality.
struct QualityModel {
  LossVariant variant = LossVariant::kSigmoid3D;
  // Sigmoid3D: mu1..mu5. Other variants use their published constants and
  // ignore this vector.
  std::vector<double> coefficients{0.013, 0.0044, 0.0057, 8.18, 0.14};
  double kappa1 = 35.4278;
  double kappa2 = 102.2444;
  // Upper end of the sigma range the fit was made on.
  double sigma_max = 0.6;
  bool clamp_quality_at_zero = false;

  // MNIST, NLL loss (default).
  static QualityModel mnist_nll();
  // MNIST, MSE loss.
  static QualityModel mnist_mse();
  // ResNet18 on CIFAR-10, two quadratic branches split at gamma = 1.
  static QualityModel cifar_piecewise();
  // MLP on 20newsgroup.
  static QualityModel newsgroup_exp();

  void validate() const;
};

LossVariant parse_loss_variant(std::string_view name);
std::string_view to_string(LossVariant v);

// Throws OutOfDomain for sigma outside [0, sigma_max].
double loss(const QualityModel& m, double sigma, double gamma);

// -kappa1 * L + kappa2, optionally clamped at zero.
double quality(const QualityModel& m, double loss_value);

// Shorthand for quality(m, loss(m, sigma, gamma)).
double quality_at(const QualityModel& m, double sigma, double gamma);

struct DirichletSpec {
  double gamma = 0.6;
  std::size_t n_classes = 10;

  void validate() const;
};

// Symmetric Dirichlet density at a point of the open simplex.
double dirichlet_pdf(const DirichletSpec& spec, std::span<const double> a);

// counts[user][class]; every class total equals n_samples_per_class.
using ClassCounts = std::vector<std::vector<std::size_t>>;

// Per class, draws user proportions from Dir(gamma * 1_{n_users}) and rounds
// them to integer counts. The rounding residue goes to the largest share.
ClassCounts dirichlet_partition(const DirichletSpec& spec, std::size_t n_users,
                                std::size_t n_samples_per_class,
                                std::uint64_t seed);

}  // namespace socialfed
