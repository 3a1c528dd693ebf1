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

#include "featpl/metrics.h"

#include <string>
#include <vector>

#include "featpl/model.h"

namespace featpl {
namespace {

// Calls fn(first, second) for every pair the order determines: ranked pairs
// in order, plus ranked-over-unranked for top-l orders.
template <typename Fn>
void ForEachDeterminedPair(const Order& order, OrderKind kind, int m, Fn fn) {
  const int l = order.length();
  for (int a = 0; a < l; ++a) {
    for (int b = a + 1; b < l; ++b) {
      fn(order.items[a], order.items[b]);
    }
  }
  if (kind == OrderKind::kTopL) {
    std::vector<bool> ranked(m, false);
    for (int i : order.items) ranked[i] = true;
    for (int i : order.items) {
      for (int u = 0; u < m; ++u) {
        if (!ranked[u]) fn(i, u);
      }
    }
  }
}

double MixPairProbUnchecked(const MixtureParams& params,
                            const FeatureTensor& features, int agent, int i1,
                            int i2) {
  double prob = 0.0;
  for (int r = 0; r < params.num_components(); ++r) {
    prob += params.alpha[r] * PairwiseProbability(features, agent, i1, i2,
                                                  params.betas[r],
                                                  PairwiseFamily::kLogistic);
  }
  return prob;
}

}  // namespace

double ParamMse(const Eigen::VectorXd& estimate,
                const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size() || estimate.size() == 0) {
    throw DimensionError("parameter vectors have lengths " +
                         std::to_string(estimate.size()) + " and " +
                         std::to_string(truth.size()));
  }
  return (estimate - truth).squaredNorm() / estimate.size();
}

double MixturePairwiseProbability(const MixtureParams& params,
                                  const FeatureTensor& features, int agent,
                                  int i1, int i2) {
  Validate(params, features.num_alternatives());
  return MixPairProbUnchecked(params, features, agent, i1, i2);
}

double PairwiseAccuracy(const MixtureParams& params,
                        const FeatureTensor& features,
                        const Profile& test_profile) {
  ValidateProfile(test_profile, features);
  Validate(params, features.num_alternatives());
  const int m = features.num_alternatives();
  double total = 0.0;
  for (const Order& order : test_profile.orders) {
    double correct = 0.0;
    int pairs = 0;
    ForEachDeterminedPair(order, test_profile.kind, m, [&](int i1, int i2) {
      ++pairs;
      if (MixPairProbUnchecked(params, features, order.agent, i1, i2) >
          0.5) {
        correct += 1.0;
      }
    });
    total += correct / pairs;
  }
  return total / test_profile.size();
}

double PairwiseMse(const MixtureParams& params, const FeatureTensor& features,
                   const Profile& test_profile) {
  ValidateProfile(test_profile, features);
  Validate(params, features.num_alternatives());
  const int m = features.num_alternatives();
  double total = 0.0;
  for (const Order& order : test_profile.orders) {
    double sum = 0.0;
    int pairs = 0;
    ForEachDeterminedPair(order, test_profile.kind, m, [&](int i1, int i2) {
      ++pairs;
      const double p =
          MixPairProbUnchecked(params, features, order.agent, i1, i2);
      sum += (1.0 - p) * (1.0 - p);
    });
    total += sum / pairs;
  }
  return total / test_profile.size();
}

}  // namespace featpl
