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

#include "featpl/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace featpl {
namespace {

constexpr int kMaxSubsetRedraws = 1000000;

void CheckAgent(const FeatureTensor& features, int agent) {
  if (agent < 0 || agent >= features.num_agents()) {
    throw DimensionError("agent index " + std::to_string(agent) +
                         " out of range [0, " +
                         std::to_string(features.num_agents()) + ")");
  }
}

void CheckBeta(const FeatureTensor& features, const Eigen::VectorXd& beta) {
  if (beta.size() != features.num_features()) {
    throw DimensionError("beta has length " + std::to_string(beta.size()) +
                         ", expected d = " +
                         std::to_string(features.num_features()));
  }
}

// Initial choice set for the order's first position: a top-l order competes
// against all m alternatives, an l-way order only within its subset.
std::vector<int> InitialChoiceSet(const Order& order, OrderKind kind, int m) {
  if (kind == OrderKind::kTopL) {
    std::vector<int> all(m);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  return order.items;
}

void RemoveFromChoiceSet(std::vector<int>& remaining, int item) {
  auto it = std::find(remaining.begin(), remaining.end(), item);
  std::swap(*it, remaining.back());
  remaining.pop_back();
}

// ln prod_p exp(theta[i_p]) / sum_{q in remaining_p} exp(theta[q]).
double LogOrderProbImpl(const FeatureTensor& features, const Order& order,
                        OrderKind kind, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd theta = features.agent(order.agent).transpose() * beta;
  std::vector<int> remaining =
      InitialChoiceSet(order, kind, features.num_alternatives());
  double log_prob = 0.0;
  for (int item : order.items) {
    log_prob += theta[item] - LogSumExp(theta, remaining);
    RemoveFromChoiceSet(remaining, item);
  }
  return log_prob;
}

// Accumulates the gradient of one order's log-probability into grad.
void AccumulateGrad(const FeatureTensor& features, const Order& order,
                    OrderKind kind, const Eigen::VectorXd& beta, double weight,
                    Eigen::VectorXd& grad) {
  const Eigen::MatrixXd& x = features.agent(order.agent);
  const Eigen::VectorXd theta = x.transpose() * beta;
  std::vector<int> remaining =
      InitialChoiceSet(order, kind, features.num_alternatives());
  Eigen::VectorXd mean(features.num_features());
  for (int item : order.items) {
    double max_theta = theta[remaining[0]];
    for (int q : remaining) max_theta = std::max(max_theta, theta[q]);
    double total = 0.0;
    mean.setZero();
    for (int q : remaining) {
      const double w = std::exp(theta[q] - max_theta);
      total += w;
      mean += w * x.col(q);
    }
    grad += weight * (x.col(item) - mean / total);
    RemoveFromChoiceSet(remaining, item);
  }
}

// Accumulates the Hessian of one order's log-probability into hess: minus
// the softmax covariance of the remaining feature vectors at each position.
void AccumulateHessian(const FeatureTensor& features, const Order& order,
                       OrderKind kind, const Eigen::VectorXd& beta,
                       Eigen::MatrixXd& hess) {
  const Eigen::MatrixXd& x = features.agent(order.agent);
  const Eigen::VectorXd theta = x.transpose() * beta;
  const int d = features.num_features();
  std::vector<int> remaining =
      InitialChoiceSet(order, kind, features.num_alternatives());
  Eigen::VectorXd mean(d);
  Eigen::MatrixXd second(d, d);
  for (int item : order.items) {
    double max_theta = theta[remaining[0]];
    for (int q : remaining) max_theta = std::max(max_theta, theta[q]);
    double total = 0.0;
    mean.setZero();
    second.setZero();
    for (int q : remaining) {
      const double w = std::exp(theta[q] - max_theta);
      total += w;
      mean += w * x.col(q);
      second.selfadjointView<Eigen::Lower>().rankUpdate(x.col(q), w);
    }
    mean /= total;
    second /= total;
    second.triangularView<Eigen::StrictlyUpper>() =
        second.transpose().triangularView<Eigen::StrictlyUpper>();
    hess -= second - mean * mean.transpose();
    RemoveFromChoiceSet(remaining, item);
  }
}

// Inverse-CDF draw from softmax weights over `remaining`.
int DrawSoftmax(const Eigen::VectorXd& theta, const std::vector<int>& remaining,
                Rng& rng) {
  double max_theta = theta[remaining[0]];
  for (int q : remaining) max_theta = std::max(max_theta, theta[q]);
  double total = 0.0;
  for (int q : remaining) total += std::exp(theta[q] - max_theta);
  const double u = rng.Uniform() * total;
  double cum = 0.0;
  for (int q : remaining) {
    cum += std::exp(theta[q] - max_theta);
    if (u < cum) return q;
  }
  return remaining.back();
}

void CheckWeights(const Profile& profile, const Eigen::VectorXd& weights) {
  if (weights.size() != profile.size()) {
    throw DimensionError("got " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(profile.size()) +
                         " orders");
  }
  if (!weights.allFinite() || weights.minCoeff() < 0.0) {
    throw DomainError("order weights must be finite and nonnegative");
  }
}

}  // namespace

double LogSumExp(const Eigen::VectorXd& values,
                 const std::vector<int>& subset) {
  double max_value = values[subset[0]];
  for (int q : subset) max_value = std::max(max_value, values[q]);
  double total = 0.0;
  for (int q : subset) total += std::exp(values[q] - max_value);
  return max_value + std::log(total);
}

Eigen::VectorXd Utilities(const FeatureTensor& features, int agent,
                          const Eigen::VectorXd& beta) {
  CheckAgent(features, agent);
  CheckBeta(features, beta);
  return features.agent(agent).transpose() * beta;
}

double LogTopLProbability(const FeatureTensor& features, const Order& order,
                          const Eigen::VectorXd& beta) {
  CheckBeta(features, beta);
  ValidateOrder(order, OrderKind::kTopL, features.num_alternatives(),
                features.num_agents());
  return LogOrderProbImpl(features, order, OrderKind::kTopL, beta);
}

double TopLProbability(const FeatureTensor& features, const Order& order,
                       const Eigen::VectorXd& beta) {
  return std::exp(LogTopLProbability(features, order, beta));
}

double LogLWayProbability(const FeatureTensor& features, const Order& order,
                          const Eigen::VectorXd& beta) {
  CheckBeta(features, beta);
  ValidateOrder(order, OrderKind::kLWay, features.num_alternatives(),
                features.num_agents());
  return LogOrderProbImpl(features, order, OrderKind::kLWay, beta);
}

double TopLProbabilityWithPhi(const FeatureTensor& features,
                              const Order& order, const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& phi) {
  ValidatePhi(phi, features.num_alternatives());
  return phi[order.length() - 1] * TopLProbability(features, order, beta);
}

double MixtureTopLProbability(const FeatureTensor& features,
                              const Order& order,
                              const MixtureParams& params) {
  Validate(params, features.num_alternatives());
  ValidatePhi(params.phi, features.num_alternatives());
  double mix = 0.0;
  for (int r = 0; r < params.num_components(); ++r) {
    mix += params.alpha[r] * TopLProbability(features, order, params.betas[r]);
  }
  return params.phi[order.length() - 1] * mix;
}

double LogLikelihood(const Profile& profile, const FeatureTensor& features,
                     const Eigen::VectorXd& beta,
                     const Eigen::VectorXd& phi) {
  if (profile.kind != OrderKind::kTopL) {
    throw DomainError("the phi-extended log-likelihood needs a top-l profile");
  }
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  ValidatePhi(phi, features.num_alternatives());
  double ll = 0.0;
  for (const Order& order : profile.orders) {
    const double phi_l = phi[order.length() - 1];
    if (phi_l <= 0.0) {
      throw SupportError("phi is zero at observed order length " +
                         std::to_string(order.length()));
    }
    ll += std::log(phi_l) +
          LogOrderProbImpl(features, order, OrderKind::kTopL, beta);
  }
  return ll;
}

double BetaLogLikelihood(const Profile& profile, const FeatureTensor& features,
                         const Eigen::VectorXd& beta) {
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  double ll = 0.0;
  for (const Order& order : profile.orders) {
    ll += LogOrderProbImpl(features, order, profile.kind, beta);
  }
  return ll;
}

double WeightedBetaLogLikelihood(const Profile& profile,
                                 const FeatureTensor& features,
                                 const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights) {
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  CheckWeights(profile, weights);
  double ll = 0.0;
  for (int j = 0; j < profile.size(); ++j) {
    if (weights[j] == 0.0) continue;
    ll += weights[j] *
          LogOrderProbImpl(features, profile.orders[j], profile.kind, beta);
  }
  return ll;
}

Eigen::VectorXd GradBeta(const Profile& profile, const FeatureTensor& features,
                         const Eigen::VectorXd& beta) {
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(features.num_features());
  for (const Order& order : profile.orders) {
    AccumulateGrad(features, order, profile.kind, beta, 1.0, grad);
  }
  return grad;
}

Eigen::VectorXd WeightedGradBeta(const Profile& profile,
                                 const FeatureTensor& features,
                                 const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights) {
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  CheckWeights(profile, weights);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(features.num_features());
  for (int j = 0; j < profile.size(); ++j) {
    if (weights[j] == 0.0) continue;
    AccumulateGrad(features, profile.orders[j], profile.kind, beta, weights[j],
                   grad);
  }
  return grad;
}

Eigen::MatrixXd HessianBeta(const Profile& profile,
                            const FeatureTensor& features,
                            const Eigen::VectorXd& beta) {
  ValidateProfile(profile, features);
  CheckBeta(features, beta);
  const int d = features.num_features();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
  for (const Order& order : profile.orders) {
    AccumulateHessian(features, order, profile.kind, beta, hess);
  }
  // Exact symmetry for downstream eigensolvers.
  hess = ((hess + hess.transpose()) / 2.0).eval();
  return hess;
}

Order SampleTopL(const FeatureTensor& features, int agent,
                 const Eigen::VectorXd& beta, const Eigen::VectorXd& phi,
                 Rng& rng) {
  CheckAgent(features, agent);
  CheckBeta(features, beta);
  ValidatePhi(phi, features.num_alternatives());
  const int m = features.num_alternatives();

  int length = m - 1;
  const double u = rng.Uniform();
  double cum = 0.0;
  for (int l = 1; l <= m - 1; ++l) {
    cum += phi[l - 1];
    if (u < cum) {
      length = l;
      break;
    }
  }

  const Eigen::VectorXd theta = features.agent(agent).transpose() * beta;
  std::vector<int> remaining(m);
  std::iota(remaining.begin(), remaining.end(), 0);
  Order order;
  order.agent = agent;
  order.items.reserve(length);
  for (int p = 0; p < length; ++p) {
    const int pick = DrawSoftmax(theta, remaining, rng);
    order.items.push_back(pick);
    RemoveFromChoiceSet(remaining, pick);
  }
  return order;
}

Order SampleLWay(const FeatureTensor& features, int agent,
                 const Eigen::VectorXd& beta, double p, Rng& rng) {
  CheckAgent(features, agent);
  CheckBeta(features, beta);
  if (!(p > 0.0) || p > 1.0) {
    throw DomainError("subset inclusion probability must be in (0, 1], got " +
                      std::to_string(p));
  }
  const int m = features.num_alternatives();
  std::vector<int> subset;
  for (int attempt = 0; attempt < kMaxSubsetRedraws; ++attempt) {
    subset.clear();
    for (int i = 0; i < m; ++i) {
      if (rng.Bernoulli(p)) subset.push_back(i);
    }
    if (subset.size() >= 2) break;
    subset.clear();
  }
  if (subset.size() < 2) {
    throw DomainError("no subset of size >= 2 after 10^6 draws (p = " +
                      std::to_string(p) + ")");
  }

  const Eigen::VectorXd theta = features.agent(agent).transpose() * beta;
  Order order;
  order.agent = agent;
  order.items.reserve(subset.size());
  while (!subset.empty()) {
    const int pick = DrawSoftmax(theta, subset, rng);
    order.items.push_back(pick);
    RemoveFromChoiceSet(subset, pick);
  }
  return order;
}

double LogisticCdf(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double ProbitCdf(double t) {
  // Phi(t / sqrt(2)) = erfc(-t / 2) / 2.
  return 0.5 * std::erfc(-0.5 * t);
}

double PairwiseProbability(const FeatureTensor& features, int agent, int i1,
                           int i2, const Eigen::VectorXd& beta,
                           PairwiseFamily family) {
  CheckAgent(features, agent);
  CheckBeta(features, beta);
  const int m = features.num_alternatives();
  if (i1 < 0 || i1 >= m || i2 < 0 || i2 >= m || i1 == i2) {
    throw DimensionError("pairwise probability needs two distinct in-range "
                         "alternatives, got " +
                         std::to_string(i1) + " and " + std::to_string(i2));
  }
  const Eigen::MatrixXd& x = features.agent(agent);
  const double gap = beta.dot(x.col(i1) - x.col(i2));
  return family == PairwiseFamily::kLogistic ? LogisticCdf(gap)
                                             : ProbitCdf(gap);
}

}  // namespace featpl
