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

namespace socialfed {

struct PrivacyParams {
  double theta1 = 100.0;
  double theta2 = 1.0;
  double delta = 1e-6;
  double sigma_max = 0.6;
  double alpha_th = 0.7;

  void validate() const;
};

// Privacy budget granted to a member whose trust in the head is alpha.
// Strictly increasing in alpha; alpha must lie in (0,1).
double trust_to_budget(const PrivacyParams& p, double alpha);

// Minimum Gaussian-mechanism noise multiplier for (epsilon, delta),
// sqrt(2 ln(1.25/delta)) / epsilon, before any ceiling is applied.
double gaussian_noise_multiplier(double epsilon, double delta);

// gaussian_noise_multiplier clamped to sigma_max.
double budget_to_noise_scale(const PrivacyParams& p, double epsilon);

// Noise scale a member applies given trust alpha to the cluster head:
// raw update above the threshold, sigma_max with zero trust, the trust
// mapped budget in between.
double effective_noise_scale(const PrivacyParams& p, double alpha);

// Budget after Poisson sub-sampling at rate lambda_s:
// ln(1 + lambda_s * (e^epsilon - 1)). Reporting only.
double amplified_budget(double epsilon, double lambda_s);

}  // namespace socialfed
