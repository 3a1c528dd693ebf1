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
// Plackett-Luce with per-agent alternative features: an agent j ranks
// alternatives by sequential softmax selection over utilities
// u_i = beta . x_{ji}. This header evaluates order probabilities (top-l
// marginals and subset rankings), the beta log-likelihood with its analytic
// gradient and Hessian, pairwise win probabilities for the logistic and
// probit utility-noise families, and samples orders from the model.
//
// All evaluation happens in the log domain with log-sum-exp, so large
// utility gaps do not overflow. Everything here is a pure function of its
// arguments and safe to call concurrently; samplers mutate only the caller's
// Rng.

#ifndef FEATPL_MODEL_H_
#define FEATPL_MODEL_H_

#include "Eigen/Dense"
#include "featpl/rng.h"
#include "featpl/types.h"

namespace featpl {

// Distribution of the latent utility noise; fixes the pairwise win CDF.
// kLogistic is the Plackett-Luce (Gumbel noise) case, kProbit unit-variance
// Gaussian noise, giving Phi(delta / sqrt(2)).
enum class PairwiseFamily { kLogistic, kProbit };

// Utility vector (beta . x_{j1}, ..., beta . x_{jm}) for one agent.
Eigen::VectorXd Utilities(const FeatureTensor& features, int agent,
                          const Eigen::VectorXd& beta);

// Log marginal probability that the agent's top of the ranking is exactly
// order.items (a top-l order): at each position the named alternative is
// chosen from everything not yet chosen, ranked or not.
double LogTopLProbability(const FeatureTensor& features, const Order& order,
                          const Eigen::VectorXd& beta);
double TopLProbability(const FeatureTensor& features, const Order& order,
                       const Eigen::VectorXd& beta);

// Log probability of ranking the subset order.items in the given sequence,
// competing only within the subset (an l-way order). The subset-selection
// prefactor of the two-step generative process is not included.
double LogLWayProbability(const FeatureTensor& features, const Order& order,
                          const Eigen::VectorXd& beta);

// Top-l probability including the report-length factor phi[l-1].
double TopLProbabilityWithPhi(const FeatureTensor& features,
                              const Order& order,
                              const Eigen::VectorXd& beta,
                              const Eigen::VectorXd& phi);

// phi[l-1] * sum_r alpha_r * TopLProbability(order | beta_r).
double MixtureTopLProbability(const FeatureTensor& features,
                              const Order& order,
                              const MixtureParams& params);

// Full log-likelihood sum_j (ln phi[l_j] + ln Pr(O_j | beta)) of a top-l
// profile. Throws SupportError if phi vanishes on an observed length.
double LogLikelihood(const Profile& profile, const FeatureTensor& features,
                     const Eigen::VectorXd& beta, const Eigen::VectorXd& phi);

// The beta-dependent part sum_j ln Pr(O_j | beta); valid for both order
// kinds. This is the objective the MLE maximizes.
double BetaLogLikelihood(const Profile& profile, const FeatureTensor& features,
                         const Eigen::VectorXd& beta);
// sum_j weights[j] * ln Pr(O_j | beta) with weights >= 0.
double WeightedBetaLogLikelihood(const Profile& profile,
                                 const FeatureTensor& features,
                                 const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights);

// Analytic gradient of BetaLogLikelihood: per position, the chosen
// alternative's features minus the softmax-expected features of the
// remaining choice set.
Eigen::VectorXd GradBeta(const Profile& profile, const FeatureTensor& features,
                         const Eigen::VectorXd& beta);
Eigen::VectorXd WeightedGradBeta(const Profile& profile,
                                 const FeatureTensor& features,
                                 const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights);

// Analytic Hessian of BetaLogLikelihood: minus the sum of per-position
// softmax covariance matrices of the remaining features. Always symmetric
// negative semidefinite.
Eigen::MatrixXd HessianBeta(const Profile& profile,
                            const FeatureTensor& features,
                            const Eigen::VectorXd& beta);

// Draws a top-l order: l ~ phi, then sequential selection without
// replacement with softmax weights (inverse-CDF per position).
Order SampleTopL(const FeatureTensor& features, int agent,
                 const Eigen::VectorXd& beta, const Eigen::VectorXd& phi,
                 Rng& rng);

// Draws an l-way order: each alternative enters the subset independently
// with probability p, subsets smaller than 2 are redrawn (at most 10^6
// attempts), and the accepted subset is ranked by the model.
Order SampleLWay(const FeatureTensor& features, int agent,
                 const Eigen::VectorXd& beta, double p, Rng& rng);

// Probability that the agent prefers alternative i1 over i2:
// f(beta . (x_{ji1} - x_{ji2})) with f the family's win CDF. f is strictly
// increasing with f(0) = 1/2 and f(t) + f(-t) = 1.
double PairwiseProbability(const FeatureTensor& features, int agent, int i1,
                           int i2, const Eigen::VectorXd& beta,
                           PairwiseFamily family);

// Win CDFs on the utility-gap scale, exposed for reuse by the composite
// likelihood code. LogisticCdf(t) = 1/(1+exp(-t)); ProbitCdf(t) =
// Phi(t/sqrt(2)), the win probability of a unit-variance Gaussian race.
double LogisticCdf(double t);
double ProbitCdf(double t);

// Numerically stable log of a vector's exp-sum restricted to `subset`.
double LogSumExp(const Eigen::VectorXd& values, const std::vector<int>& subset);

}  // namespace featpl

#endif  // FEATPL_MODEL_H_
