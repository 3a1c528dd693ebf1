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

#include "featpl/mixture.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "featpl/model.h"
#include "featpl/rng.h"
#include "oracles.h"

namespace featpl {
namespace {

using oracles::RandomFeatures;
using oracles::RandomSimplex;
using oracles::RandomVector;

// Mixture data with the planted component recorded per order.
struct Planted {
  FeatureTensor features;
  MixtureParams truth;
  Profile profile;
  std::vector<int> source;
};

Planted PlantMixture(int n, int m, int d, const std::vector<Eigen::VectorXd>& betas,
                     const Eigen::VectorXd& alpha, Rng& rng) {
  Planted data{RandomFeatures(n, m, d, -1, 1, rng), {}, {}, {}};
  data.truth.alpha = alpha;
  data.truth.betas = betas;
  data.truth.phi = Eigen::VectorXd::Zero(m - 1);
  data.truth.phi[m - 2] = 1.0;
  data.profile.kind = OrderKind::kTopL;
  data.profile.num_alternatives = m;
  for (int j = 0; j < n; ++j) {
    const double u = rng.Uniform();
    int r = 0;
    double cum = 0.0;
    for (int s = 0; s < alpha.size(); ++s) {
      cum += alpha[s];
      r = s;
      if (u < cum) break;
    }
    data.source.push_back(r);
    data.profile.orders.push_back(
        SampleTopL(data.features, j, betas[r], data.truth.phi, rng));
  }
  return data;
}

TEST_CASE("responsibilities") {
  Rng rng(81);
  const int m = 4, d = 3, n = 20;
  const FeatureTensor features = RandomFeatures(n, m, d, -1, 1, rng);
  const Eigen::VectorXd phi = RandomSimplex(m - 1, rng);
  Profile profile{OrderKind::kTopL, m, {}};
  for (int j = 0; j < n; ++j) {
    profile.orders.push_back(
        SampleTopL(features, j, RandomVector(d, -1, 1, rng), phi, rng));
  }

  SUBCASE("single component gets everything") {
    MixtureParams params;
    params.alpha = Eigen::VectorXd::Ones(1);
    params.betas = {RandomVector(d, -1, 1, rng)};
    params.phi = phi;
    const Eigen::MatrixXd w = EStep(profile, features, params);
    CHECK(w.rows() == n);
    CHECK((w.array() == 1.0).all());
  }
  SUBCASE("identical components split by the mixing coefficients") {
    const Eigen::VectorXd beta = RandomVector(d, -1, 1, rng);
    MixtureParams params;
    params.alpha.resize(2);
    params.alpha << 0.3, 0.7;
    params.betas = {beta, beta};
    params.phi = phi;
    const Eigen::MatrixXd w = EStep(profile, features, params);
    for (int j = 0; j < n; ++j) {
      CHECK(w(j, 0) == doctest::Approx(0.3).epsilon(1e-12));
      CHECK(w(j, 1) == doctest::Approx(0.7).epsilon(1e-12));
    }
  }
  SUBCASE("random parameters match the Bayes-rule oracle") {
    MixtureParams params;
    params.alpha = RandomSimplex(3, rng);
    params.betas = {RandomVector(d, -2, 2, rng), RandomVector(d, -2, 2, rng),
                    RandomVector(d, -2, 2, rng)};
    params.phi = phi;
    const Eigen::MatrixXd w = EStep(profile, features, params);
    for (int j = 0; j < n; ++j) {
      double denom = 0.0;
      std::vector<double> numer(3);
      for (int r = 0; r < 3; ++r) {
        numer[r] = params.alpha[r] * oracles::NaiveTopLProbability(
                                         features, profile.orders[j],
                                         params.betas[r]);
        denom += numer[r];
      }
      for (int r = 0; r < 3; ++r) {
        CHECK(w(j, r) == doctest::Approx(numer[r] / denom).epsilon(1e-9));
      }
      CHECK(w.row(j).sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("mixing-coefficient update") {
  SUBCASE("uniform responsibilities") {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(6, 3, 1.0 / 3);
    const Eigen::VectorXd alpha = MStepAlpha(w);
    for (int r = 0; r < 3; ++r) {
      CHECK(alpha[r] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
  }
  SUBCASE("hard assignments give cluster proportions") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 2);
    w(0, 0) = w(1, 0) = w(2, 0) = 1.0;
    w(3, 1) = 1.0;
    const Eigen::VectorXd alpha = MStepAlpha(w);
    CHECK(alpha[0] == 0.75);
    CHECK(alpha[1] == 0.25);
  }
  SUBCASE("stays on the simplex for random inputs") {
    Rng rng(82);
    for (int t = 0; t < 20; ++t) {
      const int n = 1 + static_cast<int>(rng.UniformInt(30));
      const int k = 1 + static_cast<int>(rng.UniformInt(4));
      Eigen::MatrixXd w(n, k);
      for (int j = 0; j < n; ++j) {
        w.row(j) = RandomSimplex(k, rng).transpose();
      }
      CHECK(MStepAlpha(w).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("EM with one component degenerates to the plain MLE") {
  Rng rng(83);
  const int m = 5, d = 3, n = 80;
  const FeatureTensor features = RandomFeatures(n, m, d, -1, 1, rng);
  const Eigen::VectorXd phi = RandomSimplex(m - 1, rng);
  Profile profile{OrderKind::kTopL, m, {}};
  const Eigen::VectorXd beta0 = RandomVector(d, -1, 1, rng);
  for (int j = 0; j < n; ++j) {
    profile.orders.push_back(SampleTopL(features, j, beta0, phi, rng));
  }
  EmOptions options;
  options.k = 1;
  options.seed = 7;
  const EmReport report = EmFit(profile, features, options);
  const FitReport plain = FitBeta(profile, features);
  CHECK((report.estimate.betas[0] - plain.beta_hat).lpNorm<Eigen::Infinity>() <=
        1e-6);
  CHECK(report.estimate.alpha[0] == 1.0);
}

TEST_CASE("EM log-likelihood trace never decreases") {
  Rng rng(84);
  Planted data = PlantMixture(
      120, 5, 3, {RandomVector(3, -2, 2, rng), RandomVector(3, -2, 2, rng)},
      RandomSimplex(2, rng), rng);
  EmOptions options;
  options.k = 2;
  options.iterations = 25;
  options.seed = 11;
  const EmReport report = EmFit(data.profile, data.features, options);
  REQUIRE(report.log_likelihood_trace.size() >= 2);
  for (std::size_t i = 1; i < report.log_likelihood_trace.size(); ++i) {
    CHECK(report.log_likelihood_trace[i] >=
          report.log_likelihood_trace[i - 1] - 1e-8);
  }
  // Responsibility rows and alpha stay on the simplex.
  for (int j = 0; j < report.responsibilities.rows(); ++j) {
    CHECK(report.responsibilities.row(j).sum() ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(report.estimate.alpha.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("a single EM iteration commutes with component permutation") {
  Rng rng(85);
  const int m = 4, d = 3, n = 50, k = 3;
  const FeatureTensor features = RandomFeatures(n, m, d, -1, 1, rng);
  const Eigen::VectorXd phi = RandomSimplex(m - 1, rng);
  Profile profile{OrderKind::kTopL, m, {}};
  for (int j = 0; j < n; ++j) {
    profile.orders.push_back(
        SampleTopL(features, j, RandomVector(d, -2, 2, rng), phi, rng));
  }
  MixtureParams params;
  params.alpha = RandomSimplex(k, rng);
  params.betas = {RandomVector(d, -1, 1, rng), RandomVector(d, -1, 1, rng),
                  RandomVector(d, -1, 1, rng)};
  params.phi = phi;

  auto one_iteration = [&](const MixtureParams& p) {
    const Eigen::MatrixXd w = EStep(profile, features, p);
    MixtureParams next = p;
    next.alpha = MStepAlpha(w);
    for (int r = 0; r < p.num_components(); ++r) {
      OptimizerOptions inner;
      inner.initial_beta = p.betas[r];
      next.betas[r] = FitBetaWeighted(profile, features, w.col(r), inner);
    }
    return next;
  };

  const std::vector<int> perm{2, 0, 1};
  MixtureParams permuted;
  permuted.alpha.resize(k);
  permuted.betas.resize(k);
  permuted.phi = phi;
  for (int r = 0; r < k; ++r) {
    permuted.alpha[r] = params.alpha[perm[r]];
    permuted.betas[r] = params.betas[perm[r]];
  }

  const MixtureParams next = one_iteration(params);
  const MixtureParams next_permuted = one_iteration(permuted);
  for (int r = 0; r < k; ++r) {
    CHECK(next_permuted.alpha[r] ==
          doctest::Approx(next.alpha[perm[r]]).epsilon(1e-10));
    CHECK((next_permuted.betas[r] - next.betas[perm[r]])
              .lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("well-separated components are assigned correctly") {
  Rng rng(86);
  Eigen::VectorXd beta1 = Eigen::VectorXd::Constant(3, 4.0);
  Eigen::VectorXd beta2 = -beta1;
  Eigen::VectorXd alpha(2);
  alpha << 0.5, 0.5;
  Planted data = PlantMixture(200, 5, 3, {beta1, beta2}, alpha, rng);
  EmOptions options;
  options.k = 2;
  options.iterations = 30;
  options.seed = 3;
  const EmReport report = EmFit(data.profile, data.features, options);

  // Count agreements under both labelings; take the better one.
  int direct = 0, swapped = 0;
  for (int j = 0; j < 200; ++j) {
    const int assigned = report.responsibilities(j, 0) >= 0.5 ? 0 : 1;
    direct += assigned == data.source[j];
    swapped += (1 - assigned) == data.source[j];
  }
  CHECK(std::max(direct, swapped) >= 190);
}

TEST_CASE("direct maximization") {
  Rng rng(87);
  SUBCASE("one component matches the plain fit") {
    const int m = 4, d = 3, n = 60;
    const FeatureTensor features = RandomFeatures(n, m, d, -1, 1, rng);
    const Eigen::VectorXd phi = RandomSimplex(m - 1, rng);
    Profile profile{OrderKind::kTopL, m, {}};
    const Eigen::VectorXd beta0 = RandomVector(d, -1, 1, rng);
    for (int j = 0; j < n; ++j) {
      profile.orders.push_back(SampleTopL(features, j, beta0, phi, rng));
    }
    EmOptions options;
    options.seed = 5;
    const DirectMleReport report =
        DirectMixtureMle(profile, features, 1, options);
    const FitReport plain = FitBeta(profile, features);
    CHECK((report.estimate.betas[0] - plain.beta_hat)
              .lpNorm<Eigen::Infinity>() <= 1e-5);
    CHECK(report.estimate.alpha[0] == 1.0);
  }
  SUBCASE("comparable likelihood to EM on planted data") {
    Eigen::VectorXd alpha(2);
    alpha << 0.6, 0.4;
    Planted data = PlantMixture(
        150, 5, 3,
        {RandomVector(3, -2, 2, rng), RandomVector(3, -2, 2, rng)}, alpha,
        rng);
    EmOptions options;
    options.k = 2;
    options.seed = 9;
    const EmReport em = EmFit(data.profile, data.features, options);
    const DirectMleReport direct =
        DirectMixtureMle(data.profile, data.features, 2, options);
    const double em_ll = em.log_likelihood_trace.back();
    // The joint objective is non-concave: accept either a matching optimum
    // or an explicitly flagged non-converged run.
    CHECK((direct.log_likelihood >= em_ll - std::abs(em_ll) * 0.02 ||
           !direct.converged));
    // Both alphas live on the simplex.
    CHECK(direct.estimate.alpha.minCoeff() > 0.0);
    CHECK(direct.estimate.alpha.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("component alignment") {
  Rng rng(88);
  SUBCASE("identity for one component") {
    MixtureParams params;
    params.alpha = Eigen::VectorXd::Ones(1);
    params.betas = {RandomVector(3, -1, 1, rng)};
    const AlignedComponents aligned = AlignComponents(params, params);
    CHECK(aligned.permutation == std::vector<int>{0});
    CHECK(aligned.per_component_mse[0] == 0.0);
  }
  SUBCASE("detects a swap") {
    MixtureParams truth;
    truth.alpha.resize(2);
    truth.alpha << 0.7, 0.3;
    truth.betas = {RandomVector(4, -2, 2, rng), RandomVector(4, -2, 2, rng)};
    MixtureParams swapped;
    swapped.alpha.resize(2);
    swapped.alpha << 0.3, 0.7;
    swapped.betas = {truth.betas[1], truth.betas[0]};
    const AlignedComponents aligned = AlignComponents(swapped, truth);
    CHECK(aligned.permutation == std::vector<int>{1, 0});
    CHECK(aligned.total_squared_error == 0.0);
    CHECK(aligned.estimate.alpha[0] == 0.7);
  }
  SUBCASE("matches the exhaustive oracle at k = 3") {
    for (int trial = 0; trial < 10; ++trial) {
      MixtureParams truth, estimate;
      truth.alpha = RandomSimplex(3, rng);
      estimate.alpha = RandomSimplex(3, rng);
      for (int r = 0; r < 3; ++r) {
        truth.betas.push_back(RandomVector(3, -2, 2, rng));
        estimate.betas.push_back(RandomVector(3, -2, 2, rng));
      }
      const AlignedComponents aligned = AlignComponents(estimate, truth);
      // Independent exhaustive search over the 6 permutations.
      std::vector<int> perm{0, 1, 2};
      double best = 1e300;
      do {
        double cost = 0.0;
        for (int r = 0; r < 3; ++r) {
          cost += (estimate.betas[perm[r]] - truth.betas[r]).squaredNorm();
        }
        best = std::min(best, cost);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(aligned.total_squared_error == doctest::Approx(best));
    }
  }
}

TEST_CASE("planted mixtures are easier with more data") {
  Rng rng(89);
  const int trials = 6;
  double mse_small = 0.0, mse_large = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd beta1 = RandomVector(4, -2, 2, rng);
    const Eigen::VectorXd beta2 = RandomVector(4, -2, 2, rng);
    Eigen::VectorXd alpha(2);
    alpha << 0.5, 0.5;
    for (const int n : {150, 800}) {
      Planted data = PlantMixture(n, 5, 4, {beta1, beta2}, alpha, rng);
      EmOptions options;
      options.k = 2;
      options.iterations = 40;
      options.seed = 1000 + t;
      options.restarts = 2;
      const EmReport report = EmFit(data.profile, data.features, options);
      const AlignedComponents aligned =
          AlignComponents(report.estimate, data.truth);
      (n == 150 ? mse_small : mse_large) +=
          aligned.per_component_mse.mean() / trials;
    }
  }
  CHECK(mse_large < mse_small);
}

}  // namespace
}  // namespace featpl
