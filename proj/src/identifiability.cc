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

#include "featpl/identifiability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace featpl {
namespace {

// Effective absolute cutoff for the given matrix under the relative rule.
double RankCutoff(const Eigen::VectorXd& singular_values, Eigen::Index rows,
                  Eigen::Index cols, double rel_tol) {
  const double sigma_max =
      singular_values.size() == 0 ? 0.0 : singular_values[0];
  return rel_tol * sigma_max * static_cast<double>(std::max(rows, cols));
}

int RankFromSingularValues(const Eigen::VectorXd& sv, double cutoff) {
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  return rank;
}

// xi matrix of one order: +1 above the diagonalized preference, built from
// the transitive closure. Entries are +1/-1/0 in an m x m signed char grid.
std::vector<signed char> PreferenceSigns(const Order& order, OrderKind kind,
                                         int m) {
  std::vector<signed char> xi(static_cast<std::size_t>(m) * m, 0);
  auto set = [&](int winner, int loser) {
    xi[static_cast<std::size_t>(winner) * m + loser] = 1;
    xi[static_cast<std::size_t>(loser) * m + winner] = -1;
  };
  const int l = order.length();
  for (int a = 0; a < l; ++a) {
    for (int b = a + 1; b < l; ++b) {
      set(order.items[a], order.items[b]);
    }
  }
  if (kind == OrderKind::kTopL) {
    std::vector<bool> ranked(m, false);
    for (int i : order.items) ranked[i] = true;
    for (int i : order.items) {
      for (int u = 0; u < m; ++u) {
        if (!ranked[u]) set(i, u);
      }
    }
  }
  return xi;
}

}  // namespace

NormalizedFeatures Normalize(const FeatureTensor& features, int baseline) {
  const int m = features.num_alternatives();
  const int n = features.num_agents();
  const int d = features.num_features();
  if (baseline < 0 || baseline >= m) {
    throw DimensionError("baseline alternative " + std::to_string(baseline) +
                         " out of range [0, " + std::to_string(m) + ")");
  }
  NormalizedFeatures normalized;
  normalized.baseline = baseline;
  normalized.matrix.resize(d, static_cast<Eigen::Index>(m - 1) * n);
  Eigen::Index col = 0;
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd& x = features.agent(j);
    for (int i = 0; i < m; ++i) {
      if (i == baseline) continue;
      normalized.matrix.col(col++) = x.col(i) - x.col(baseline);
    }
  }
  return normalized;
}

Eigen::MatrixXd NormalizeColumns(const Eigen::MatrixXd& z, int baseline) {
  if (baseline < 0 || baseline >= z.cols()) {
    throw DimensionError("baseline column out of range");
  }
  Eigen::MatrixXd out(z.rows(), z.cols() - 1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    if (i == baseline) continue;
    out.col(col++) = z.col(i) - z.col(baseline);
  }
  return out;
}

std::string ToString(Verdict verdict) {
  switch (verdict) {
    case Verdict::kIdentifiable:
      return "Identifiable";
    case Verdict::kNotIdentifiable:
      return "NotIdentifiable";
    case Verdict::kConditionallyIdentifiable:
      return "ConditionallyIdentifiable";
    case Verdict::kUnknown:
      return "Unknown";
  }
  return "Unknown";
}

int NumericalRank(const Eigen::MatrixXd& matrix, double rel_tol) {
  if (!matrix.allFinite()) {
    throw DomainError("rank of a matrix with non-finite entries");
  }
  if (matrix.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  return RankFromSingularValues(
      svd.singularValues(),
      RankCutoff(svd.singularValues(), matrix.rows(), matrix.cols(), rel_tol));
}

IdReport CheckIdentifiability(const FeatureTensor& features) {
  const int d = features.num_features();
  const Eigen::MatrixXd normalized = Normalize(features).matrix;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized);
  const double rel_tol = std::numeric_limits<double>::epsilon();
  const double cutoff = RankCutoff(svd.singularValues(), normalized.rows(),
                                   normalized.cols(), rel_tol);
  IdReport report;
  report.rank = RankFromSingularValues(svd.singularValues(), cutoff);
  report.full_row_rank = report.rank == d;
  report.tolerance = cutoff;
  report.verdict = report.full_row_rank ? Verdict::kIdentifiable
                                        : Verdict::kNotIdentifiable;
  report.notes = "normalized feature matrix rank " +
                 std::to_string(report.rank) + " of " + std::to_string(d);
  return report;
}

IdReport CheckBilinearIdentifiability(const BilinearFeatures& bilinear) {
  Validate(bilinear);
  const int agent_rows = static_cast<int>(bilinear.agent_features.rows());
  const int alt_rows = static_cast<int>(bilinear.alternative_features.rows());
  const int rank_y = NumericalRank(bilinear.agent_features);
  const Eigen::MatrixXd norm_z =
      NormalizeColumns(bilinear.alternative_features);
  const int rank_z = NumericalRank(norm_z);

  IdReport report;
  report.rank = rank_y * rank_z;
  report.full_row_rank = rank_y == agent_rows && rank_z == alt_rows;
  report.tolerance = std::numeric_limits<double>::epsilon();
  report.verdict = report.full_row_rank ? Verdict::kIdentifiable
                                        : Verdict::kNotIdentifiable;
  report.notes = "rank(Y) = " + std::to_string(rank_y) + " of " +
                 std::to_string(agent_rows) + ", rank(norm(Z)) = " +
                 std::to_string(rank_z) + " of " + std::to_string(alt_rows);
  return report;
}

IdReport CheckMixtureIdentifiability(const FeatureTensor& features, int k,
                                     const Eigen::VectorXd& phi) {
  if (k < 1) {
    throw DomainError("mixture size must be >= 1");
  }
  ValidatePhi(phi, features.num_alternatives());
  const int m = features.num_alternatives();
  IdReport report = CheckIdentifiability(features);
  if (!report.full_row_rank) {
    report.verdict = Verdict::kNotIdentifiable;
    report.notes += "; rank condition fails";
    return report;
  }
  if (phi[m - 2] <= 0.0) {
    report.verdict = Verdict::kUnknown;
    report.notes += "; full-length orders have zero probability, the "
                    "mixture condition does not apply";
    return report;
  }
  // Featureless k-component mixtures with known identifiability; k >= 3 and
  // k = 2 with m <= 3 are open.
  const bool known = (k == 1) || (k == 2 && m >= 4);
  if (known) {
    report.verdict = k == 1 ? Verdict::kIdentifiable
                            : Verdict::kConditionallyIdentifiable;
    report.notes += "; k = " + std::to_string(k) +
                    (k == 1 ? "" : ", identifiable modulo label switching");
  } else {
    report.verdict = Verdict::kUnknown;
    report.notes += "; identifiability of k = " + std::to_string(k) +
                    " mixtures over m = " + std::to_string(m) +
                    " alternatives is open";
  }
  return report;
}

FeatureTensor LiftBilinear(const BilinearFeatures& bilinear) {
  Validate(bilinear);
  const Eigen::MatrixXd& y = bilinear.agent_features;
  const Eigen::MatrixXd& z = bilinear.alternative_features;
  const int agent_rows = static_cast<int>(y.rows());
  const int alt_rows = static_cast<int>(z.rows());
  const int n = static_cast<int>(y.cols());
  const int m = static_cast<int>(z.cols());
  std::vector<Eigen::MatrixXd> agents(n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd x(alt_rows * agent_rows, m);
    for (int i = 0; i < m; ++i) {
      // y_j (x) z_i: block b holds y_j[b] * z_i.
      for (int b = 0; b < agent_rows; ++b) {
        x.col(i).segment(static_cast<Eigen::Index>(b) * alt_rows, alt_rows) =
            y(b, j) * z.col(i);
      }
    }
    agents[j] = std::move(x);
  }
  return FeatureTensor(std::move(agents));
}

Eigen::VectorXd LiftBilinearParameter(const Eigen::MatrixXd& b) {
  return Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
}

std::optional<Eigen::VectorXd> NullSpaceWitness(
    const FeatureTensor& features) {
  const int d = features.num_features();
  const Eigen::MatrixXd normalized = Normalize(features).matrix;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized, Eigen::ComputeFullU);
  const double cutoff = RankCutoff(svd.singularValues(), normalized.rows(),
                                   normalized.cols(),
                                   std::numeric_limits<double>::epsilon());
  const int rank = RankFromSingularValues(svd.singularValues(), cutoff);
  if (rank == d) return std::nullopt;
  Eigen::VectorXd nu = svd.matrixU().col(d - 1);
  // Canonical sign: first entry of nontrivial magnitude positive.
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    if (std::abs(nu[i]) > 1e-12) {
      if (nu[i] < 0) nu = -nu;
      break;
    }
  }
  return nu;
}

SignDiversityReport CheckSignDiversity(const FeatureTensor& features,
                                       const Profile& profile) {
  ValidateProfile(profile, features);
  const int m = features.num_alternatives();
  const int d = features.num_features();

  std::vector<std::vector<signed char>> xi;
  xi.reserve(profile.orders.size());
  for (const Order& order : profile.orders) {
    xi.push_back(PreferenceSigns(order, profile.kind, m));
  }

  SignDiversityReport report;
  report.holds = true;
  for (int r = 0; r < d; ++r) {
    bool found = false;
    SignDiversityWitness witness;
    witness.r = r;
    for (int i1 = 0; i1 < m && !found; ++i1) {
      for (int i2 = i1 + 1; i2 < m && !found; ++i2) {
        // First two distinct agents seen on each sign of xi * feature gap.
        int plus[2] = {-1, -1};
        int minus[2] = {-1, -1};
        for (std::size_t o = 0; o < profile.orders.size(); ++o) {
          const Order& order = profile.orders[o];
          const int sign_xi = xi[o][static_cast<std::size_t>(i1) * m + i2];
          if (sign_xi == 0) continue;
          const Eigen::MatrixXd& x = features.agent(order.agent);
          const double gap = x(r, i1) - x(r, i2);
          if (gap == 0.0) continue;
          int* side = sign_xi * (gap > 0 ? 1 : -1) > 0 ? plus : minus;
          if (side[0] < 0) {
            side[0] = order.agent;
          } else if (side[1] < 0 && side[0] != order.agent) {
            side[1] = order.agent;
          }
        }
        if (plus[0] < 0 || minus[0] < 0) continue;
        // The two sides must name distinct agents.
        int a = plus[0];
        int b = minus[0];
        if (a == b) {
          if (plus[1] >= 0) {
            a = plus[1];
          } else if (minus[1] >= 0) {
            b = minus[1];
          } else {
            continue;
          }
        }
        witness.agent1 = a;
        witness.agent2 = b;
        witness.i1 = i1;
        witness.i2 = i2;
        found = true;
      }
    }
    if (found) {
      report.witnesses.push_back(witness);
    } else {
      report.holds = false;
      report.missing.push_back(r);
    }
  }
  if (!report.holds) report.witnesses.clear();
  return report;
}

double RankViolationFrequency(const FeatureTensor& pool, int n_sub, int trials,
                              Rng& rng) {
  if (n_sub < 1 || n_sub > pool.num_agents()) {
    throw DomainError("subsample size " + std::to_string(n_sub) +
                      " outside [1, " + std::to_string(pool.num_agents()) +
                      "]");
  }
  if (trials < 1) {
    throw DomainError("trials must be >= 1");
  }
  const int n = pool.num_agents();
  std::vector<int> indices(n);
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    std::iota(indices.begin(), indices.end(), 0);
    // Partial Fisher-Yates: first n_sub entries are a uniform subsample.
    for (int i = 0; i < n_sub; ++i) {
      const int j = i + static_cast<int>(rng.UniformInt(n - i));
      std::swap(indices[i], indices[j]);
    }
    std::vector<Eigen::MatrixXd> agents;
    agents.reserve(n_sub);
    for (int i = 0; i < n_sub; ++i) {
      agents.push_back(pool.agent(indices[i]));
    }
    const FeatureTensor sub(std::move(agents));
    if (!CheckIdentifiability(sub).full_row_rank) ++violations;
  }
  return static_cast<double>(violations) / trials;
}

}  // namespace featpl
