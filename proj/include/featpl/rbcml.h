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
// Rank breaking plus composite marginal likelihood: each order is broken
// into its implied pairwise comparisons, weighted by a function of the
// order length, and the parameter maximizes the weighted sum of pairwise
// log win probabilities. Win probabilities are agent-specific through the
// features, so pairs remember the agent that produced them; the classical
// aggregated comparison-count matrix is the agent-blind projection.

#ifndef FEATPL_RBCML_H_
#define FEATPL_RBCML_H_

#include <vector>

#include "Eigen/Dense"
#include "featpl/mle.h"
#include "featpl/model.h"
#include "featpl/types.h"

namespace featpl {

enum class WeightingKind { kUniform, kHarmonic, kCustom };

// Weight w(l) applied to every pairwise comparison broken out of an order
// of length l. Uniform is 1; harmonic is 1/(l-1) (1 for l = 1), which keeps
// the total pair mass of an order linear in its length instead of
// quadratic.
class WeightingFunction {
 public:
  WeightingFunction() = default;

  static WeightingFunction Uniform();
  static WeightingFunction Harmonic();
  // table[i] is w(i + 2), covering l in [2, 2 + table.size()); every entry
  // must be positive. Lengths outside the table throw on use.
  static WeightingFunction Custom(std::vector<double> table);

  WeightingKind kind() const { return kind_; }
  double operator()(int length) const;

 private:
  WeightingKind kind_ = WeightingKind::kUniform;
  std::vector<double> table_;
};

// One broken comparison: `agent` prefers alternative `first` over `second`,
// carrying the weight of its source order.
struct PairContribution {
  int agent = 0;
  int first = 0;
  int second = 0;
  double weight = 0.0;
};

struct BreakingGraph {
  // kappa(i1, i2) = total weight of comparisons i1 over i2; zero diagonal.
  Eigen::MatrixXd kappa;
  // Per-agent contributions, in profile order; these drive the
  // feature-dependent composite likelihood.
  std::vector<PairContribution> contributions;
};

// Breaks every order into weighted pairwise comparisons. Top-l orders
// contribute ranked-vs-ranked and ranked-vs-unranked pairs (the order's
// transitive closure); l-way orders contribute pairs within their subset.
BreakingGraph BreakProfile(const Profile& profile,
                           const WeightingFunction& weighting);

// sum over broken pairs of w * ln Pr(first beats second | beta, family).
// Concave in beta for the logistic family.
double CompositeLogLikelihood(const Profile& profile,
                              const FeatureTensor& features,
                              const Eigen::VectorXd& beta,
                              PairwiseFamily family,
                              const WeightingFunction& weighting);

// Quasi-Newton ascent on the composite log-likelihood. The report reuses
// the MLE FitReport shape; phi_hat stays empty and lambda1 is the smallest
// eigenvalue of minus the composite Hessian over the order count.
FitReport FitRbcml(const Profile& profile, const FeatureTensor& features,
                   PairwiseFamily family, const WeightingFunction& weighting,
                   const OptimizerOptions& options = {});

}  // namespace featpl

#endif  // FEATPL_RBCML_H_
