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
// Identifiability checks for feature-conditioned Plackett-Luce models.
// Per-agent utilities are invariant to shifting all of an agent's feature
// vectors, so what matters is the baseline-normalized feature matrix whose
// columns are x_{ji} - x_{j,baseline}. The model's parameter is identifiable
// exactly when that matrix has full row rank; the same rank condition
// governs strict concavity of the MLE objective and carries over to other
// utility-noise families (e.g. probit) whose pairwise CDFs are strictly
// increasing.

#ifndef FEATPL_IDENTIFIABILITY_H_
#define FEATPL_IDENTIFIABILITY_H_

#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "featpl/rng.h"
#include "featpl/types.h"

namespace featpl {

// The d x (m-1)n matrix [norm(X_1), ..., norm(X_n)] where norm(X_j) stacks
// the columns x_{ji} - x_{j,baseline} for i != baseline in increasing i.
struct NormalizedFeatures {
  Eigen::MatrixXd matrix;
  int baseline = 0;
};

NormalizedFeatures Normalize(const FeatureTensor& features, int baseline = 0);

// norm(Z) for a K x m alternative-feature matrix: columns z_i - z_baseline,
// i != baseline.
Eigen::MatrixXd NormalizeColumns(const Eigen::MatrixXd& z, int baseline = 0);

enum class Verdict {
  kIdentifiable,
  kNotIdentifiable,
  kConditionallyIdentifiable,
  kUnknown,
};

std::string ToString(Verdict verdict);

struct IdReport {
  int rank = 0;
  bool full_row_rank = false;
  double tolerance = 0.0;  // absolute singular-value cutoff actually used
  Verdict verdict = Verdict::kUnknown;
  std::string notes;
};

// Number of singular values above rel_tol * sigma_max * max(rows, cols).
// The default rel_tol is machine epsilon, the standard numerical-rank rule.
int NumericalRank(const Eigen::MatrixXd& matrix,
                  double rel_tol = std::numeric_limits<double>::epsilon());

// Identifiable iff the normalized feature matrix has full row rank d.
IdReport CheckIdentifiability(const FeatureTensor& features);

// Bilinear special case: identifiable iff the agent-feature matrix Y has
// full row rank L and norm(Z) has full row rank K.
IdReport CheckBilinearIdentifiability(const BilinearFeatures& bilinear);

// Mixture case: with full-row-rank features and phi[m-2] > 0, a k-component
// mixture is identifiable modulo label switching for the (k, m) pairs where
// the featureless mixture is known identifiable: k = 1 (any m) and k = 2
// with m >= 4. Other (k, m) are open, reported as kUnknown.
IdReport CheckMixtureIdentifiability(const FeatureTensor& features, int k,
                                     const Eigen::VectorXd& phi);

// Lifts bilinear features to the equivalent per-agent tensor with
// x_{ji} = y_j (x) z_i (Kronecker product), dimension d = L*K.
FeatureTensor LiftBilinear(const BilinearFeatures& bilinear);

// Column-major vectorization of the K x L bilinear parameter B, matching
// LiftBilinear: vec(B) . (y_j (x) z_i) = z_i^T B y_j.
Eigen::VectorXd LiftBilinearParameter(const Eigen::MatrixXd& b);

// When the normalized features are rank-deficient, a unit vector nu with
// Norm^T nu = 0: beta and beta + c*nu induce identical order distributions.
// Deterministic (left singular vector of the smallest singular value, sign
// fixed). nullopt when full row rank.
std::optional<Eigen::VectorXd> NullSpaceWitness(const FeatureTensor& features);

// One (feature coordinate, agent pair, alternative pair) witnessing opposite
// preference-weighted feature gaps.
struct SignDiversityWitness {
  int r = 0;       // feature coordinate
  int agent1 = 0;
  int agent2 = 0;
  int i1 = 0;
  int i2 = 0;
};

struct SignDiversityReport {
  bool holds = false;
  // One witness per feature coordinate when holds.
  std::vector<SignDiversityWitness> witnesses;
  // Coordinates with no witness when !holds.
  std::vector<int> missing;
};

// Boundedness condition for the MLE: for every feature coordinate r there
// are two agents whose pairwise preference xi and feature gap on some
// alternative pair multiply to opposite signs. Preferences come from the
// transitive closure of each order (top-l: ranked beat ranked-later and all
// unranked; pairs of unranked alternatives are undetermined, xi = 0).
SignDiversityReport CheckSignDiversity(const FeatureTensor& features,
                                       const Profile& profile);

// Monte-Carlo estimate of the probability that n_sub agents subsampled
// without replacement from the pool fail the full-row-rank condition.
double RankViolationFrequency(const FeatureTensor& pool, int n_sub, int trials,
                              Rng& rng);

}  // namespace featpl

#endif  // FEATPL_IDENTIFIABILITY_H_
