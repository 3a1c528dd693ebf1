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
// Maximum-likelihood estimation. The log-likelihood separates into a
// length-distribution part, solved in closed form by frequency counting,
// and a concave utility-parameter part maximized by quasi-Newton ascent.
// A high-probability L2 error bound for the utility estimate and the
// matching sample-size calculator follow the Hessian eigenvalue route.

#ifndef FEATPL_MLE_H_
#define FEATPL_MLE_H_

#include <cstdint>
#include <optional>

#include "Eigen/Dense"
#include "featpl/optimize.h"
#include "featpl/types.h"

namespace featpl {

struct OptimizerOptions {
  int max_iters = 500;
  // Convergence tolerance on the per-order gradient ||grad / n||_inf.
  double grad_tol = 1e-8;
  // Starting point; empty means the zero vector (the uniform model).
  Eigen::VectorXd initial_beta;
  // Backtracking line search (Armijo).
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  // Abort with DivergenceError when ||beta||_inf passes this; a diverging
  // fit signals the sign-diversity boundedness condition fails.
  double divergence_bound = 1e6;

  BfgsOptions ToBfgs(int num_orders) const;
};

struct FitReport {
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd phi_hat;  // empty when the fit did not estimate phi
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  // Smallest eigenvalue of -H(beta_hat)/n, the per-order curvature floor;
  // > 0 exactly when the normalized features have full row rank.
  double lambda1 = 0.0;
  std::optional<double> rmse_bound;
  bool sign_diversity_ok = false;
};

// phi[l-1] = (number of length-l orders) / (number of orders), the exact
// MLE of the length distribution.
Eigen::VectorXd EstimatePhi(const Profile& profile);

// Maximizes sum_j ln Pr(O_j | beta) from options.initial_beta. The report
// carries the curvature and sign-diversity diagnostics; rmse_bound stays
// unset (it needs a confidence level, see RmseBound).
FitReport FitBeta(const Profile& profile, const FeatureTensor& features,
                  const OptimizerOptions& options = {});

// Maximizes sum_j weights[j] ln Pr(O_j | beta), weights >= 0. Still concave.
Eigen::VectorXd FitBetaWeighted(const Profile& profile,
                                const FeatureTensor& features,
                                const Eigen::VectorXd& weights,
                                const OptimizerOptions& options = {});

// Smallest eigenvalue of -H(beta)/n over the profile.
double CurvatureFloor(const Profile& profile, const FeatureTensor& features,
                      const Eigen::VectorXd& beta);

// With probability 1 - delta, ||beta_hat - beta_0||_2 is at most
//   sqrt(8 (m-1)^2 c^2 d ln(2d/delta)) / (lambda_min sqrt(n)),
// with c the feature spread and lambda_min approximated by the curvature
// floor at beta_star (accurate once n is moderately large). Throws
// DomainError when the floor is within tolerance of zero (rank-deficient
// features leave the bound undefined).
double RmseBound(const FeatureTensor& features, const Profile& profile,
                 const Eigen::VectorXd& beta_star, double delta);

// Smallest n for which the error bound above drops to eps:
// ceil(8 (m-1)^2 c^2 d ln(2d/delta) / (lambda_min^2 eps^2)).
std::int64_t SampleComplexity(int m, int d, double c, double lambda_min,
                              double eps, double delta);

}  // namespace featpl

#endif  // FEATPL_MLE_H_
