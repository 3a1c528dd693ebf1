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

#include "featpl/rbcml.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "featpl/identifiability.h"

namespace featpl {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;

// ln Phi(z) and the Mills ratio phi(z)/Phi(z), stable in the far left tail
// where both the density and the CDF underflow.
double LogNormalCdf(double z) {
  if (z > -30.0) {
    return std::log(0.5 * std::erfc(-z / kSqrt2));
  }
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
  return -0.5 * z2 - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

double MillsRatio(double z) {
  if (z > -30.0) {
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return density / (0.5 * std::erfc(-z / kSqrt2));
  }
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
  return -z / series;
}

// ln f(gap), d ln f / d gap, d^2 ln f / d gap^2 for the win CDF f.
struct PairTerms {
  double log_prob;
  double dlog;
  double d2log;
};

PairTerms EvaluatePair(double gap, PairwiseFamily family) {
  PairTerms terms;
  if (family == PairwiseFamily::kLogistic) {
    // ln sigma(gap) = -ln(1 + exp(-gap)).
    const double p = LogisticCdf(gap);
    terms.log_prob = gap >= 0.0 ? -std::log1p(std::exp(-gap))
                                : gap - std::log1p(std::exp(gap));
    terms.dlog = 1.0 - p;
    terms.d2log = -p * (1.0 - p);
  } else {
    const double z = gap / kSqrt2;
    const double mills = MillsRatio(z);
    terms.log_prob = LogNormalCdf(z);
    terms.dlog = mills / kSqrt2;
    terms.d2log = -(z * mills + mills * mills) / 2.0;
  }
  return terms;
}

std::vector<PairContribution> Contributions(const Profile& profile,
                                            const WeightingFunction& weighting) {
  std::vector<PairContribution> contributions;
  const int m = profile.num_alternatives;
  for (const Order& order : profile.orders) {
    const double w = weighting(order.length());
    for (std::size_t a = 0; a < order.items.size(); ++a) {
      for (std::size_t b = a + 1; b < order.items.size(); ++b) {
        contributions.push_back(
            {order.agent, order.items[a], order.items[b], w});
      }
    }
    if (profile.kind == OrderKind::kTopL) {
      std::vector<bool> ranked(m, false);
      for (int i : order.items) ranked[i] = true;
      for (int i : order.items) {
        for (int u = 0; u < m; ++u) {
          if (!ranked[u]) contributions.push_back({order.agent, i, u, w});
        }
      }
    }
  }
  return contributions;
}

double CllFromContributions(const std::vector<PairContribution>& contributions,
                            const FeatureTensor& features,
                            const Eigen::VectorXd& beta, PairwiseFamily family,
                            Eigen::VectorXd* grad) {
  if (grad != nullptr) grad->setZero();
  double cll = 0.0;
  for (const PairContribution& pair : contributions) {
    const Eigen::MatrixXd& x = features.agent(pair.agent);
    const Eigen::VectorXd diff = x.col(pair.first) - x.col(pair.second);
    const PairTerms terms = EvaluatePair(beta.dot(diff), family);
    cll += pair.weight * terms.log_prob;
    if (grad != nullptr) *grad += pair.weight * terms.dlog * diff;
  }
  return cll;
}

Eigen::MatrixXd CllHessian(const std::vector<PairContribution>& contributions,
                           const FeatureTensor& features,
                           const Eigen::VectorXd& beta,
                           PairwiseFamily family) {
  const Eigen::Index d = beta.size();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
  for (const PairContribution& pair : contributions) {
    const Eigen::MatrixXd& x = features.agent(pair.agent);
    const Eigen::VectorXd diff = x.col(pair.first) - x.col(pair.second);
    const PairTerms terms = EvaluatePair(beta.dot(diff), family);
    hess += pair.weight * terms.d2log * (diff * diff.transpose());
  }
  return ((hess + hess.transpose()) / 2.0).eval();
}

}  // namespace

WeightingFunction WeightingFunction::Uniform() { return WeightingFunction(); }

WeightingFunction WeightingFunction::Harmonic() {
  WeightingFunction w;
  w.kind_ = WeightingKind::kHarmonic;
  return w;
}

WeightingFunction WeightingFunction::Custom(std::vector<double> table) {
  if (table.empty()) {
    throw DomainError("custom weighting table is empty");
  }
  for (double w : table) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("custom weights must be positive and finite");
    }
  }
  WeightingFunction w;
  w.kind_ = WeightingKind::kCustom;
  w.table_ = std::move(table);
  return w;
}

double WeightingFunction::operator()(int length) const {
  switch (kind_) {
    case WeightingKind::kUniform:
      return 1.0;
    case WeightingKind::kHarmonic:
      return length > 1 ? 1.0 / (length - 1) : 1.0;
    case WeightingKind::kCustom: {
      const int idx = length - 2;
      if (idx < 0 || idx >= static_cast<int>(table_.size())) {
        throw DomainError("custom weighting has no entry for order length " +
                          std::to_string(length));
      }
      return table_[idx];
    }
  }
  return 1.0;
}

BreakingGraph BreakProfile(const Profile& profile,
                           const WeightingFunction& weighting) {
  for (const Order& order : profile.orders) {
    ValidateOrder(order, profile.kind, profile.num_alternatives);
  }
  BreakingGraph graph;
  graph.contributions = Contributions(profile, weighting);
  const int m = profile.num_alternatives;
  graph.kappa = Eigen::MatrixXd::Zero(m, m);
  for (const PairContribution& pair : graph.contributions) {
    graph.kappa(pair.first, pair.second) += pair.weight;
  }
  return graph;
}

double CompositeLogLikelihood(const Profile& profile,
                              const FeatureTensor& features,
                              const Eigen::VectorXd& beta,
                              PairwiseFamily family,
                              const WeightingFunction& weighting) {
  ValidateProfile(profile, features);
  if (beta.size() != features.num_features()) {
    throw DimensionError("beta length does not match the feature dimension");
  }
  return CllFromContributions(Contributions(profile, weighting), features,
                              beta, family, nullptr);
}

FitReport FitRbcml(const Profile& profile, const FeatureTensor& features,
                   PairwiseFamily family, const WeightingFunction& weighting,
                   const OptimizerOptions& options) {
  ValidateProfile(profile, features);
  const int n = profile.size();
  const int d = features.num_features();
  const std::vector<PairContribution> contributions =
      Contributions(profile, weighting);

  FitReport report;
  report.sign_diversity_ok = CheckSignDiversity(features, profile).holds;

  const Objective objective = [&](const Eigen::VectorXd& beta,
                                  Eigen::VectorXd* grad) {
    if (grad != nullptr) grad->resize(d);
    return CllFromContributions(contributions, features, beta, family, grad);
  };

  Eigen::VectorXd beta0 = options.initial_beta.size() == 0
                              ? Eigen::VectorXd::Zero(d)
                              : options.initial_beta;
  if (beta0.size() != d) {
    throw DimensionError("initial beta length does not match d");
  }

  BfgsResult solution;
  try {
    solution = MaximizeBfgs(objective, std::move(beta0), options.ToBfgs(n));
  } catch (const DivergenceError& e) {
    throw DivergenceError(
        std::string(e.what()) + "; sign-diversity condition " +
        (report.sign_diversity_ok ? "holds" : "FAILS") +
        " on this profile (a failing condition allows an unbounded estimate)");
  }

  report.beta_hat = solution.x;
  report.log_likelihood = solution.value;
  report.iterations = solution.iterations;
  report.converged = solution.converged;
  const Eigen::MatrixXd neg_hessian =
      -CllHessian(contributions, features, report.beta_hat, family) / n;
  report.lambda1 =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(neg_hessian)
          .eigenvalues()
          .minCoeff();
  return report;
}

}  // namespace featpl
