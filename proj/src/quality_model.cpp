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

#include "socialfed/quality_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "socialfed/errors.hpp"

namespace socialfed {

QualityModel QualityModel::mnist_nll() { return QualityModel{}; }

QualityModel QualityModel::mnist_mse() {
  QualityModel m;
  m.coefficients = {0.013, 0.0021, 0.0057, 8.20, 0.14};
  return m;
}

QualityModel QualityModel::cifar_piecewise() {
  QualityModel m;
  m.variant = LossVariant::kPiecewisePoly;
  m.coefficients.clear();
  m.sigma_max = 0.3;
  return m;
}

QualityModel QualityModel::newsgroup_exp() {
  QualityModel m;
  m.variant = LossVariant::kExpFit;
  m.coefficients.clear();
  return m;
}

void QualityModel::validate() const {
  if (!(kappa1 > 0.0)) throw InvalidArgument("quality: kappa1 must be > 0");
  if (!(sigma_max > 0.0))
    throw InvalidArgument("quality: sigma_max must be > 0");
  if (variant == LossVariant::kSigmoid3D) {
    if (coefficients.size() != 5)
      throw InvalidArgument("quality: sigmoid3d needs 5 coefficients");
    for (double mu : coefficients) {
      if (!(mu > 0.0))
        throw InvalidArgument("quality: sigmoid3d coefficients must be > 0");
    }
  }
}

LossVariant parse_loss_variant(std::string_view name) {
  if (name == "sigmoid3d") return LossVariant::kSigmoid3D;
  if (name == "piecewise_poly") return LossVariant::kPiecewisePoly;
  if (name == "exp_fit") return LossVariant::kExpFit;
  throw InvalidArgument("unknown loss variant: " + std::string(name));
}

std::string_view to_string(LossVariant v) {
  switch (v) {
    case LossVariant::kSigmoid3D:
      return "sigmoid3d";
    case LossVariant::kPiecewisePoly:
      return "piecewise_poly";
    case LossVariant::kExpFit:
      return "exp_fit";
  }
  return "?";
}

double loss(const QualityModel& m, double sigma, double gamma) {
  if (!(sigma >= 0.0 && sigma <= m.sigma_max)) {
    throw OutOfDomain("loss: sigma outside the fitted range [0, sigma_max]");
  }
  // gamma = 0 is the closed end of the fit and is accepted.
  if (!(gamma >= 0.0)) throw InvalidArgument("loss: gamma must be >= 0");
  switch (m.variant) {
    case LossVariant::kSigmoid3D: {
      const auto& mu = m.coefficients;
      return mu[0] * std::exp(-mu[1] * gamma) /
                 (mu[2] + std::exp(-mu[3] * sigma)) +
             mu[4];
    }
    case LossVariant::kPiecewisePoly: {
      const double g = gamma;
      const double s = sigma;
      // The two branches are separate fits and do not meet at gamma = 1.
      if (g <= 1.0) {
        return 1.951 - 2.132 * g + 14.21 * s + 1.163 * g * g +
               3.782 * g * s - 44.68 * s * s;
      }
      return 1.026 - 0.042 * g + 16.83 * s + 0.003 * g * g - 0.0775 * g * s -
             35.54 * s * s;
    }
    case LossVariant::kExpFit:
      return 2.053 * std::exp(-0.0139 * gamma + 1.1574 * sigma) - 0.7306;
  }
  return 0.0;
}

double quality(const QualityModel& m, double loss_value) {
  const double q = -m.kappa1 * loss_value + m.kappa2;
  return m.clamp_quality_at_zero ? std::max(q, 0.0) : q;
}

double quality_at(const QualityModel& m, double sigma, double gamma) {
  return quality(m, loss(m, sigma, gamma));
}

void DirichletSpec::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("dirichlet: gamma must be > 0");
  if (n_classes < 2) throw InvalidArgument("dirichlet: need at least 2 classes");
}

double dirichlet_pdf(const DirichletSpec& spec, std::span<const double> a) {
  spec.validate();
  if (a.size() != spec.n_classes) {
    throw InvalidArgument("dirichlet_pdf: dimension mismatch");
  }
  double total = 0.0;
  for (double v : a) {
    if (!(v > 0.0)) throw InvalidArgument("dirichlet_pdf: point off simplex");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("dirichlet_pdf: point off simplex");
  }
  const double y = static_cast<double>(spec.n_classes);
  const double log_beta =
      y * std::lgamma(spec.gamma) - std::lgamma(y * spec.gamma);
  double log_density = -log_beta;
  for (double v : a) log_density += (spec.gamma - 1.0) * std::log(v);
  return std::exp(log_density);
}

ClassCounts dirichlet_partition(const DirichletSpec& spec, std::size_t n_users,
                                std::size_t n_samples_per_class,
                                std::uint64_t seed) {
  spec.validate();
  if (n_users == 0) throw InvalidArgument("dirichlet_partition: no users");
  ClassCounts counts(n_users, std::vector<std::size_t>(spec.n_classes, 0));
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma_draw(spec.gamma, 1.0);
  std::vector<double> share(n_users);
  std::vector<long long> alloc(n_users);

  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    double total = 0.0;
    for (auto& s : share) {
      s = gamma_draw(rng);
      total += s;
    }
    if (!(total > 0.0)) {
      // Every gamma variate underflowed; put the class on one user.
      std::fill(share.begin(), share.end(), 0.0);
      share[std::uniform_int_distribution<std::size_t>(0, n_users - 1)(rng)] =
          1.0;
      total = 1.0;
    }
    long long assigned = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
      share[u] /= total;
      alloc[u] = std::llround(share[u] * static_cast<double>(n_samples_per_class));
      assigned += alloc[u];
    }
    long long residue = static_cast<long long>(n_samples_per_class) - assigned;
    const auto largest = static_cast<std::size_t>(
        std::max_element(share.begin(), share.end()) - share.begin());
    alloc[largest] += residue;
    // A negative residue larger than the top allocation spills over to the
    // next-largest allocations.
    while (alloc[largest] < 0) {
      long long deficit = -alloc[largest];
      alloc[largest] = 0;
      auto donor = static_cast<std::size_t>(
          std::max_element(alloc.begin(), alloc.end()) - alloc.begin());
      alloc[donor] -= deficit;
    }
    for (std::size_t u = 0; u < n_users; ++u) {
      counts[u][c] = static_cast<std::size_t>(alloc[u]);
    }
  }
  return counts;
}

}  // namespace socialfed
