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
// Seeded synthetic benchmarks: draw features and ground-truth parameters
// uniformly at random, sample one order per agent, fit with the chosen
// estimator, and aggregate error metrics over trials into CSV report rows
// with 95% t-interval half-widths. Trials run in parallel on RNG streams
// derived from (seed, trial index), so thread count never changes results.

#ifndef FEATPL_SYNTHETIC_H_
#define FEATPL_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "featpl/io.h"
#include "featpl/mixture.h"
#include "featpl/mle.h"
#include "featpl/rbcml.h"
#include "featpl/rng.h"
#include "featpl/types.h"

namespace featpl {

// How agents truncate their reports.
struct LengthPolicy {
  enum class Kind { kFixed, kPhi, kLWay };
  Kind kind = Kind::kFixed;
  int fixed_length = 1;
  Eigen::VectorXd phi;
  double subset_probability = 0.5;

  static LengthPolicy Fixed(int l);
  static LengthPolicy FromPhi(Eigen::VectorXd phi);
  static LengthPolicy LWay(double p);

  // The implied length distribution for top-l policies; throws for kLWay.
  Eigen::VectorXd ToPhi(int num_alternatives) const;
};

struct ExperimentConfig {
  int m = 10;
  int d = 10;
  int k = 1;
  std::vector<int> n_values = {200, 500, 1000, 2000};
  LengthPolicy length_policy;  // default: fixed l = 1
  double feat_lo = -1.0;
  double feat_hi = 1.0;
  double beta_lo = -2.0;
  double beta_hi = 2.0;
  int trials = 1;
  std::uint64_t seed = 0;
  // "mle", "em", "direct", or "rbcml".
  std::string estimator = "mle";
  PairwiseFamily family = PairwiseFamily::kLogistic;
  WeightingKind weighting = WeightingKind::kUniform;
  OptimizerOptions optimizer;
  EmOptions em;
  int threads = 0;  // 0 = hardware concurrency
};

struct SyntheticData {
  FeatureTensor features;
  MixtureParams truth;
  Profile profile;
};

// Features i.i.d. uniform in [feat_lo, feat_hi], component parameters
// i.i.d. uniform in [beta_lo, beta_hi], mixing coefficients uniform draws
// normalized to the simplex (k >= 2), one order per agent.
SyntheticData GenerateSynthetic(const ExperimentConfig& config, int n,
                                Rng& rng);

// Per-trial rows plus one aggregate row (trial = "all") per (n, metric).
std::vector<ReportRow> RunSweep(const ExperimentConfig& config);

// 95% confidence half-width t_{0.975, T-1} * s / sqrt(T); zero when T < 2.
double CiHalfWidth(const std::vector<double>& samples);

}  // namespace featpl

#endif  // FEATPL_SYNTHETIC_H_
