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

#ifndef FEATPL_METRICS_H_
#define FEATPL_METRICS_H_

#include "Eigen/Dense"
#include "featpl/types.h"

namespace featpl {

// Per-coordinate mean squared error ||estimate - truth||^2 / d.
double ParamMse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

// Mixture win probability: sum_r alpha_r * logistic(beta_r . (x_i1 - x_i2)).
double MixturePairwiseProbability(const MixtureParams& params,
                                  const FeatureTensor& features, int agent,
                                  int i1, int i2);

// Fraction of test pairwise comparisons the model predicts with probability
// strictly above 1/2, averaged per order then over the profile. Full test
// rankings score all m-choose-2 pairs; top-l and l-way test orders score
// only the pairs the order determines, with the denominator adjusted.
// Ties at exactly 1/2 count as incorrect.
double PairwiseAccuracy(const MixtureParams& params,
                        const FeatureTensor& features,
                        const Profile& test_profile);

// Mean over determined test pairs of (1 - predicted win probability)^2,
// averaged per order then over the profile.
double PairwiseMse(const MixtureParams& params, const FeatureTensor& features,
                   const Profile& test_profile);

}  // namespace featpl

#endif  // FEATPL_METRICS_H_
