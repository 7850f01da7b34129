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

#include "socialfed/privacy_mapper.hpp"

#include <cmath>

#include "socialfed/errors.hpp"

namespace socialfed {

void PrivacyParams::validate() const {
  if (!(theta1 > 0.0)) throw InvalidArgument("privacy: theta1 must be > 0");
  if (!(theta2 > 0.0)) throw InvalidArgument("privacy: theta2 must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidArgument("privacy: delta must lie in (0,1)");
  if (!(sigma_max > 0.0))
    throw InvalidArgument("privacy: sigma_max must be > 0");
  if (!(alpha_th > 0.0 && alpha_th < 1.0))
    throw InvalidArgument("privacy: alpha_th must lie in (0,1)");
}

double trust_to_budget(const PrivacyParams& p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("trust_to_budget: alpha must lie in (0,1)");
  }
  return p.theta1 * alpha / (alpha + p.theta2);
}

double gaussian_noise_multiplier(double epsilon, double delta) {
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("noise scale: epsilon must be positive");
  }
  if (std::isinf(epsilon)) return 0.0;
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

double budget_to_noise_scale(const PrivacyParams& p, double epsilon) {
  return std::fmin(gaussian_noise_multiplier(epsilon, p.delta), p.sigma_max);
}

double effective_noise_scale(const PrivacyParams& p, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("effective_noise_scale: alpha must lie in [0,1]");
  }
  if (alpha >= p.alpha_th) return 0.0;
  if (alpha == 0.0) return p.sigma_max;
  return budget_to_noise_scale(p, trust_to_budget(p, alpha));
}

double amplified_budget(double epsilon, double lambda_s) {
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("amplified_budget: epsilon must be positive");
  }
  if (!(lambda_s > 0.0 && lambda_s <= 1.0)) {
    throw InvalidArgument("amplified_budget: lambda_s must lie in (0,1]");
  }
  // log1p/expm1 keep precision for small epsilon and small rates.
  return std::log1p(lambda_s * std::expm1(epsilon));
}

}  // namespace socialfed
