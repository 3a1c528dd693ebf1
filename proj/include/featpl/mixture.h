// Copyright 2026 The featpl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Mixture learning: EM alternates responsibility updates with closed-form
// mixing-coefficient updates and weighted concave fits per component, and a
// direct joint maximizer serves as the generic-optimizer baseline. The
// length distribution separates from the mixture and is estimated once by
// counting.

#ifndef FEATPL_MIXTURE_H_
#define FEATPL_MIXTURE_H_

#include <cstdint>
#include <vector>

#include "Eigen/Dense"
#include "featpl/mle.h"
#include "featpl/types.h"

namespace featpl {

struct EmOptions {
  int k = 1;
  int iterations = 50;
  // Stops an EM run early when the log-likelihood gain drops below this.
  double ll_gain_tol = 1e-8;
  int restarts = 1;
  std::uint64_t seed = 0;
  // Components are initialized i.i.d. uniform in [init_lo, init_hi]^d.
  double init_lo = -1.0;
  double init_hi = 1.0;
  OptimizerOptions inner;
};

struct EmReport {
  MixtureParams estimate;
  // n x k; row j holds the posterior component memberships of order j.
  Eigen::MatrixXd responsibilities;
  // Observed-data mixture log-likelihood after each iteration.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool early_stopped = false;
  // Components whose mixing coefficient collapsed below 1e-12 and were
  // frozen for the remaining iterations.
  std::vector<int> collapsed;
  double e_step_seconds = 0.0;
  double m_step_seconds = 0.0;
};

struct DirectMleReport {
  MixtureParams estimate;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Observed-data log-likelihood sum_j ln(phi[l_j] sum_r alpha_r Pr(O_j|beta_r)).
double MixtureLogLikelihood(const Profile& profile,
                            const FeatureTensor& features,
                            const MixtureParams& params);

// Posterior component memberships: row j is
// alpha_r Pr(O_j | beta_r) / sum_s alpha_s Pr(O_j | beta_s). Rows lie on the
// simplex; per-order likelihoods are floored at 1e-300 so degenerate
// components cannot produce NaN rows.
Eigen::MatrixXd EStep(const Profile& profile, const FeatureTensor& features,
                      const MixtureParams& params);

// alpha_r = column mean of the responsibility matrix.
Eigen::VectorXd MStepAlpha(const Eigen::MatrixXd& responsibilities);

// Runs EM with the given options; with restarts > 1 keeps the run with the
// best final log-likelihood. Component fits are warm-started from the
// previous iterate.
EmReport EmFit(const Profile& profile, const FeatureTensor& features,
               const EmOptions& options);

// Joint quasi-Newton ascent on the mixture log-likelihood over
// (alpha, beta_1..beta_k), with alpha handled by softmax reparameterization
// so the returned coefficients are strictly positive and sum to one. The
// objective is non-concave for k >= 2; the report flags non-convergence.
DirectMleReport DirectMixtureMle(const Profile& profile,
                                 const FeatureTensor& features, int k,
                                 const EmOptions& options);

struct AlignedComponents {
  MixtureParams estimate;        // estimate with components permuted
  // Aligned component r (matched against truth component r) is original
  // estimate component permutation[r].
  std::vector<int> permutation;
  Eigen::VectorXd per_component_mse;
  double total_squared_error = 0.0;
};

// Permutes the estimate's components (and alpha) to minimize the total
// squared beta error against the truth; exhaustive over k! (k <= 8).
AlignedComponents AlignComponents(const MixtureParams& estimate,
                                  const MixtureParams& truth);

}  // namespace featpl

#endif  // FEATPL_MIXTURE_H_
