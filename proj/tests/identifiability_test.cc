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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "featpl/model.h"
#include "featpl/rng.h"
#include "oracles.h"

namespace featpl {
namespace {

using oracles::EnumerateTopLOrders;
using oracles::RandomFeatures;
using oracles::RandomSimplex;
using oracles::RandomVector;

BilinearFeatures CarMarket() {
  BilinearFeatures bilinear;
  bilinear.agent_features.resize(1, 2);
  bilinear.agent_features << 0.5, 1.0;
  bilinear.alternative_features.resize(2, 2);
  bilinear.alternative_features << 0.6, 1.0, 0.2, 0.5;
  return bilinear;
}

// d = 3 features whose third row is the sum of the first two.
FeatureTensor DependentRows(int n, int m, Rng& rng) {
  std::vector<Eigen::MatrixXd> agents;
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd x(3, m);
    x.row(0) = RandomVector(m, -1, 1, rng).transpose();
    x.row(1) = RandomVector(m, -1, 1, rng).transpose();
    x.row(2) = x.row(0) + x.row(1);
    agents.push_back(x);
  }
  return FeatureTensor(agents);
}

TEST_CASE("normalize lays out baseline differences") {
  SUBCASE("one agent, two alternatives") {
    Eigen::MatrixXd x(2, 2);
    x << 1.0, 4.0, -1.0, 2.5;
    const NormalizedFeatures normalized = Normalize(FeatureTensor({x}));
    REQUIRE(normalized.matrix.cols() == 1);
    CHECK(normalized.matrix(0, 0) == 3.0);
    CHECK(normalized.matrix(1, 0) == 3.5);
  }
  SUBCASE("identical alternatives normalize to zero") {
    Eigen::MatrixXd x(2, 3);
    x << 0.7, 0.7, 0.7, -0.2, -0.2, -0.2;
    const NormalizedFeatures normalized =
        Normalize(FeatureTensor({x, x}));
    CHECK(normalized.matrix.isZero(0.0));
  }
  SUBCASE("row dependence survives normalization") {
    Rng rng(41);
    const FeatureTensor features = DependentRows(3, 4, rng);
    const Eigen::MatrixXd normalized = Normalize(features).matrix;
    CHECK((normalized.row(0) + normalized.row(1) - normalized.row(2))
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }
}

TEST_CASE("numerical rank") {
  Rng rng(42);
  CHECK(NumericalRank(Eigen::MatrixXd::Identity(5, 5)) == 5);
  CHECK(NumericalRank(Eigen::MatrixXd::Zero(4, 7)) == 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 1 + static_cast<int>(rng.UniformInt(6));
    const int cols = d + static_cast<int>(rng.UniformInt(10));
    const Eigen::MatrixXd random = Eigen::MatrixXd::NullaryExpr(
        d, cols, [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-1, 1); });
    CHECK(NumericalRank(random) == d);
  }
}

TEST_CASE("identifiability of the feature tensor") {
  Rng rng(43);
  SUBCASE("dependent feature rows are not identifiable") {
    const FeatureTensor features = DependentRows(3, 4, rng);
    const IdReport report = CheckIdentifiability(features);
    CHECK(report.verdict == Verdict::kNotIdentifiable);
    CHECK(report.rank == 2);
    CHECK_FALSE(report.full_row_rank);
  }
  SUBCASE("the benchmark setup is identifiable essentially always") {
    int identifiable = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      const FeatureTensor features = RandomFeatures(2, 10, 10, -1, 1, rng);
      identifiable += CheckIdentifiability(features).full_row_rank;
    }
    CHECK(identifiable >= trials * 0.999);
  }
  SUBCASE("too few normalized columns can never be identifiable") {
    const FeatureTensor features = RandomFeatures(1, 2, 2, -1, 1, rng);
    const IdReport report = CheckIdentifiability(features);
    CHECK(report.verdict == Verdict::kNotIdentifiable);
    CHECK(report.rank <= 1);
  }
}

TEST_CASE("bilinear identifiability") {
  Rng rng(44);
  SUBCASE("the car market is not identifiable") {
    const IdReport report = CheckBilinearIdentifiability(CarMarket());
    CHECK(report.verdict == Verdict::kNotIdentifiable);
  }
  SUBCASE("identity-like feature matrices are identifiable") {
    BilinearFeatures bilinear;
    bilinear.agent_features = Eigen::MatrixXd::Identity(3, 3);
    bilinear.alternative_features.resize(2, 3);
    // norm(Z) = I_2 after subtracting the first column.
    bilinear.alternative_features << 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    CHECK(CheckBilinearIdentifiability(bilinear).verdict ==
          Verdict::kIdentifiable);
  }
  SUBCASE("generic random features are identifiable") {
    for (int trial = 0; trial < 10; ++trial) {
      BilinearFeatures bilinear;
      const int agent_rows = 1 + static_cast<int>(rng.UniformInt(3));
      const int alt_rows = 1 + static_cast<int>(rng.UniformInt(3));
      const int n = agent_rows + static_cast<int>(rng.UniformInt(4));
      const int m = alt_rows + 1 + static_cast<int>(rng.UniformInt(4));
      bilinear.agent_features = Eigen::MatrixXd::NullaryExpr(
          agent_rows, n,
          [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-1, 1); });
      bilinear.alternative_features = Eigen::MatrixXd::NullaryExpr(
          alt_rows, m,
          [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-1, 1); });
      CHECK(CheckBilinearIdentifiability(bilinear).verdict ==
            Verdict::kIdentifiable);
    }
  }
}

TEST_CASE("bilinear lift") {
  SUBCASE("car-market utility gaps per agent") {
    const FeatureTensor lifted = LiftBilinear(CarMarket());
    Eigen::MatrixXd b(2, 1);
    b << -1.0, 8.0 / 3.0;
    const Eigen::VectorXd beta = LiftBilinearParameter(b);
    const Eigen::VectorXd u1 = Utilities(lifted, 0, beta);
    const Eigen::VectorXd u2 = Utilities(lifted, 1, beta);
    CHECK(u1[0] - u1[1] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(u2[0] - u2[1] == doctest::Approx(-0.4).epsilon(1e-12));
  }
  SUBCASE("scalar case is a plain product") {
    BilinearFeatures bilinear;
    bilinear.agent_features.resize(1, 2);
    bilinear.agent_features << 2.0, -3.0;
    bilinear.alternative_features.resize(1, 2);
    bilinear.alternative_features << 5.0, 7.0;
    const FeatureTensor lifted = LiftBilinear(bilinear);
    CHECK(lifted.num_features() == 1);
    CHECK(lifted.agent(0)(0, 0) == 10.0);
    CHECK(lifted.agent(1)(0, 1) == -21.0);
  }
  SUBCASE("lifted dot products equal the bilinear form") {
    Rng rng(45);
    const int agent_rows = 3, alt_rows = 2, n = 4, m = 5;
    BilinearFeatures bilinear;
    bilinear.agent_features = Eigen::MatrixXd::NullaryExpr(
        agent_rows, n,
        [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-2, 2); });
    bilinear.alternative_features = Eigen::MatrixXd::NullaryExpr(
        alt_rows, m,
        [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-2, 2); });
    Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(
        alt_rows, agent_rows,
        [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-2, 2); });
    const FeatureTensor lifted = LiftBilinear(bilinear);
    const Eigen::VectorXd beta = LiftBilinearParameter(b);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m; ++i) {
        const double bilinear_form = bilinear.alternative_features.col(i)
                                         .dot(b * bilinear.agent_features.col(j));
        CHECK(std::abs(beta.dot(lifted.alternative(j, i)) - bilinear_form) <=
              1e-12);
      }
    }
  }
}

TEST_CASE("mixture identifiability table") {
  Rng rng(46);
  const FeatureTensor features = RandomFeatures(5, 4, 3, -1, 1, rng);
  Eigen::VectorXd phi(3);
  SUBCASE("two components over four alternatives") {
    phi << 0.5, 0.3, 0.2;
    CHECK(CheckMixtureIdentifiability(features, 2, phi).verdict ==
          Verdict::kConditionallyIdentifiable);
  }
  SUBCASE("no mass on full-length orders leaves the question open") {
    phi << 0.5, 0.5, 0.0;
    CHECK(CheckMixtureIdentifiability(features, 2, phi).verdict ==
          Verdict::kUnknown);
  }
  SUBCASE("three or more components are open") {
    phi << 0.5, 0.3, 0.2;
    CHECK(CheckMixtureIdentifiability(features, 3, phi).verdict ==
          Verdict::kUnknown);
    CHECK(CheckMixtureIdentifiability(features, 5, phi).verdict ==
          Verdict::kUnknown);
  }
  SUBCASE("rank failure dominates") {
    const FeatureTensor dependent = DependentRows(3, 4, rng);
    phi << 0.5, 0.3, 0.2;
    CHECK(CheckMixtureIdentifiability(dependent, 2, phi).verdict ==
          Verdict::kNotIdentifiable);
  }
}

TEST_CASE("sign diversity") {
  SUBCASE("opposite rankings with shared features satisfy it") {
    Eigen::MatrixXd x(2, 2);
    x << 1.0, 0.0, 0.3, -0.2;  // nonzero gap in each coordinate
    const FeatureTensor features({x, x});
    Profile profile{OrderKind::kTopL, 2, {{0, {0}}, {1, {1}}}};
    const SignDiversityReport report = CheckSignDiversity(features, profile);
    CHECK(report.holds);
    CHECK(report.witnesses.size() == 2);
  }
  SUBCASE("unanimous rankings with aligned gaps fail it") {
    Rng rng(47);
    std::vector<Eigen::MatrixXd> agents;
    for (int j = 0; j < 4; ++j) {
      Eigen::MatrixXd x(2, 3);
      // Column i strictly dominates later columns in every coordinate.
      x << 3.0 + rng.Uniform(), 2.0 + rng.Uniform(), 1.0 + rng.Uniform(),
          6.0 + rng.Uniform(), 4.0 + rng.Uniform(), 2.0 + rng.Uniform();
      agents.push_back(x);
    }
    const FeatureTensor features(agents);
    Profile profile{OrderKind::kTopL, 3, {}};
    for (int j = 0; j < 4; ++j) profile.orders.push_back({j, {0, 1}});
    const SignDiversityReport report = CheckSignDiversity(features, profile);
    CHECK_FALSE(report.holds);
    CHECK(report.missing.size() == 2);
  }
  SUBCASE("holds with overwhelming probability on benchmark draws") {
    Rng rng(48);
    int holds = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
      const int n = 20;
      const FeatureTensor features = RandomFeatures(n, 5, 4, -1, 1, rng);
      const Eigen::VectorXd beta0 = RandomVector(4, -2, 2, rng);
      const Eigen::VectorXd phi = RandomSimplex(4, rng);
      Profile profile{OrderKind::kTopL, 5, {}};
      for (int j = 0; j < n; ++j) {
        profile.orders.push_back(SampleTopL(features, j, beta0, phi, rng));
      }
      holds += CheckSignDiversity(features, profile).holds;
    }
    CHECK(holds >= trials * 0.99);
  }
}

TEST_CASE("verdicts do not depend on the baseline alternative") {
  Rng rng(49);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(rng.UniformInt(3));
    const int d = 2 + static_cast<int>(rng.UniformInt(3));
    const bool deficient = trial % 2 == 0;
    const FeatureTensor features =
        deficient ? DependentRows(2, m, rng)
                  : RandomFeatures(3, m, d, -1, 1, rng);
    const int full_d = features.num_features();
    const int rank0 = NumericalRank(Normalize(features, 0).matrix);
    for (int baseline = 1; baseline < m; ++baseline) {
      const int rank = NumericalRank(Normalize(features, baseline).matrix);
      CHECK((rank == full_d) == (rank0 == full_d));
    }
  }
}

TEST_CASE("rank deficiency yields an exact indistinguishable witness") {
  Rng rng(50);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 3 + static_cast<int>(rng.UniformInt(2));  // 3..4
    const FeatureTensor features = DependentRows(2, m, rng);
    const auto witness = NullSpaceWitness(features);
    REQUIRE(witness.has_value());
    const Eigen::VectorXd beta = RandomVector(3, -1, 1, rng);
    const Eigen::VectorXd other = beta + 1.7 * *witness;
    CHECK((other - beta).norm() > 1.0);
    for (int agent = 0; agent < 2; ++agent) {
      for (const Order& order : EnumerateTopLOrders(m, agent)) {
        const double p1 = TopLProbability(features, order, beta);
        const double p2 = TopLProbability(features, order, other);
        CHECK(std::abs(p1 - p2) <= 1e-10);
      }
    }
  }
  SUBCASE("full-rank features have no witness") {
    const FeatureTensor features = RandomFeatures(4, 4, 3, -1, 1, rng);
    CHECK_FALSE(NullSpaceWitness(features).has_value());
  }
}

TEST_CASE("the same rank condition governs the probit family") {
  Rng rng(51);
  const FeatureTensor features = DependentRows(2, 4, rng);
  const auto witness = NullSpaceWitness(features);
  REQUIRE(witness.has_value());
  const Eigen::VectorXd beta = RandomVector(3, -1, 1, rng);
  const Eigen::VectorXd other = beta + 2.3 * *witness;
  for (int agent = 0; agent < 2; ++agent) {
    for (int i1 = 0; i1 < 4; ++i1) {
      for (int i2 = 0; i2 < 4; ++i2) {
        if (i1 == i2) continue;
        const double p1 = PairwiseProbability(features, agent, i1, i2, beta,
                                              PairwiseFamily::kProbit);
        const double p2 = PairwiseProbability(features, agent, i1, i2, other,
                                              PairwiseFamily::kProbit);
        CHECK(std::abs(p1 - p2) <= 1e-12);
      }
    }
  }
}

TEST_CASE("bilinear check agrees with the lifted check") {
  Rng rng(52);
  // The car market and a handful of random pairs, identifiable or not.
  std::vector<BilinearFeatures> fixtures{CarMarket()};
  for (int trial = 0; trial < 8; ++trial) {
    BilinearFeatures bilinear;
    const int agent_rows = 1 + static_cast<int>(rng.UniformInt(2));
    const int alt_rows = 1 + static_cast<int>(rng.UniformInt(2));
    const int n = 1 + static_cast<int>(rng.UniformInt(4));
    const int m = 2 + static_cast<int>(rng.UniformInt(4));
    bilinear.agent_features = Eigen::MatrixXd::NullaryExpr(
        agent_rows, n,
        [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-1, 1); });
    bilinear.alternative_features = Eigen::MatrixXd::NullaryExpr(
        alt_rows, m,
        [&](Eigen::Index, Eigen::Index) { return rng.Uniform(-1, 1); });
    fixtures.push_back(bilinear);
  }
  for (const BilinearFeatures& bilinear : fixtures) {
    const IdReport direct = CheckBilinearIdentifiability(bilinear);
    const IdReport lifted = CheckIdentifiability(LiftBilinear(bilinear));
    CHECK(direct.full_row_rank == lifted.full_row_rank);
  }
}

TEST_CASE("rank violation frequency") {
  Rng rng(53);
  SUBCASE("continuous features above the dimension threshold never fail") {
    const FeatureTensor pool = RandomFeatures(60, 4, 3, -1, 1, rng);
    CHECK(RankViolationFrequency(pool, 3, 2000, rng) <= 0.01);
  }
  SUBCASE("one agent with one normalized column always fails at d = 2") {
    const FeatureTensor pool = RandomFeatures(30, 2, 2, -1, 1, rng);
    CHECK(RankViolationFrequency(pool, 1, 500, rng) == 1.0);
  }
  SUBCASE("frequency decays as the subsample grows") {
    // Discrete-valued features create genuine degeneracy at small sizes.
    std::vector<Eigen::MatrixXd> agents;
    for (int j = 0; j < 150; ++j) {
      agents.push_back(Eigen::MatrixXd::NullaryExpr(
          3, 2, [&](Eigen::Index, Eigen::Index) {
            return static_cast<double>(rng.UniformInt(2));
          }));
    }
    const FeatureTensor pool(agents);
    double previous = 1.1;
    for (int n_sub : {2, 4, 6, 8}) {
      const double freq = RankViolationFrequency(pool, n_sub, 2000, rng);
      CHECK(freq <= previous + 0.03);  // 3-sigma-ish slack on 2000 trials
      previous = freq;
    }
    CHECK(previous <= 0.05);
  }
}

}  // namespace
}  // namespace featpl
