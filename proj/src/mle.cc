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

#include "featpl/mle.h"

#include <cmath>
#include <string>

#include "featpl/identifiability.h"
#include "featpl/model.h"

namespace featpl {
namespace {

// Curvature floors at or below this count as zero (rank-deficient).
constexpr double kLambdaTol = 1e-10;

Eigen::VectorXd InitialBeta(const OptimizerOptions& options, int d) {
  if (options.initial_beta.size() == 0) {
    return Eigen::VectorXd::Zero(d);
  }
  if (options.initial_beta.size() != d) {
    throw DimensionError("initial beta has length " +
                         std::to_string(options.initial_beta.size()) +
                         ", expected d = " + std::to_string(d));
  }
  return options.initial_beta;
}

}  // namespace

BfgsOptions OptimizerOptions::ToBfgs(int num_orders) const {
  BfgsOptions bfgs;
  bfgs.max_iters = max_iters;
  bfgs.grad_tol = grad_tol * num_orders;  // tolerance is per order
  bfgs.armijo_c = armijo_c;
  bfgs.backtrack = backtrack;
  bfgs.iterate_bound = divergence_bound;
  return bfgs;
}

Eigen::VectorXd EstimatePhi(const Profile& profile) {
  if (profile.kind != OrderKind::kTopL) {
    throw DomainError("phi is only defined for top-l profiles");
  }
  if (profile.orders.empty()) {
    throw DimensionError("profile is empty");
  }
  const int m = profile.num_alternatives;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m - 1);
  for (const Order& order : profile.orders) {
    ValidateOrder(order, profile.kind, m);
    counts[order.length() - 1] += 1.0;
  }
  return counts / static_cast<double>(profile.size());
}

FitReport FitBeta(const Profile& profile, const FeatureTensor& features,
                  const OptimizerOptions& options) {
  ValidateProfile(profile, features);
  const int n = profile.size();

  FitReport report;
  report.sign_diversity_ok = CheckSignDiversity(features, profile).holds;

  const Objective objective = [&](const Eigen::VectorXd& beta,
                                  Eigen::VectorXd* grad) {
    if (grad != nullptr) *grad = GradBeta(profile, features, beta);
    return BetaLogLikelihood(profile, features, beta);
  };

  BfgsResult solution;
  try {
    solution = MaximizeBfgs(objective, InitialBeta(options, features.num_features()),
                            options.ToBfgs(n));
  } catch (const DivergenceError& e) {
    throw DivergenceError(
        std::string(e.what()) + "; sign-diversity condition " +
        (report.sign_diversity_ok ? "holds" : "FAILS") +
        " on this profile (a failing condition allows an unbounded MLE)");
  }

  report.beta_hat = solution.x;
  report.log_likelihood = solution.value;
  report.iterations = solution.iterations;
  report.converged = solution.converged;
  report.lambda1 = CurvatureFloor(profile, features, report.beta_hat);
  return report;
}

Eigen::VectorXd FitBetaWeighted(const Profile& profile,
                                const FeatureTensor& features,
                                const Eigen::VectorXd& weights,
                                const OptimizerOptions& options) {
  ValidateProfile(profile, features);
  const double total_weight = weights.sum();
  const Objective objective = [&](const Eigen::VectorXd& beta,
                                  Eigen::VectorXd* grad) {
    if (grad != nullptr) {
      *grad = WeightedGradBeta(profile, features, beta, weights);
    }
    return WeightedBetaLogLikelihood(profile, features, beta, weights);
  };
  // Scale the per-order tolerance by the weight mass instead of the count.
  BfgsOptions bfgs = options.ToBfgs(1);
  bfgs.grad_tol = options.grad_tol * std::max(total_weight, 1.0);
  return MaximizeBfgs(objective, InitialBeta(options, features.num_features()),
                      bfgs)
      .x;
}

double CurvatureFloor(const Profile& profile, const FeatureTensor& features,
                      const Eigen::VectorXd& beta) {
  const Eigen::MatrixXd neg_hessian =
      -HessianBeta(profile, features, beta) / profile.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(neg_hessian);
  return eigen.eigenvalues().minCoeff();
}

double RmseBound(const FeatureTensor& features, const Profile& profile,
                 const Eigen::VectorXd& beta_star, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw DomainError("delta must be in (0, 1), got " + std::to_string(delta));
  }
  const double lambda = CurvatureFloor(profile, features, beta_star);
  if (lambda <= kLambdaTol) {
    throw DomainError(
        "curvature floor " + std::to_string(lambda) +
        " is numerically zero; the features are rank-deficient and the "
        "error bound is undefined");
  }
  const double m = features.num_alternatives();
  const double d = features.num_features();
  const double c = features.Spread();
  const double n = profile.size();
  return std::sqrt(8.0 * (m - 1) * (m - 1) * c * c * d *
                   std::log(2.0 * d / delta)) /
         (lambda * std::sqrt(n));
}

std::int64_t SampleComplexity(int m, int d, double c, double lambda_min,
                              double eps, double delta) {
  if (m < 2 || d < 1) {
    throw DimensionError("need m >= 2 and d >= 1");
  }
  if (!(c >= 0.0) || !(lambda_min > 0.0) || !(eps > 0.0) || !(delta > 0.0) ||
      !(delta < 1.0)) {
    throw DomainError("need c >= 0, lambda_min > 0, eps > 0, delta in (0,1)");
  }
  const double n = 8.0 * (m - 1) * (m - 1) * c * c * d *
                   std::log(2.0 * d / delta) /
                   (lambda_min * lambda_min * eps * eps);
  return static_cast<std::int64_t>(std::ceil(n));
}

}  // namespace featpl
