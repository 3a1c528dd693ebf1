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

#include "featpl/synthetic.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "boost/math/distributions/students_t.hpp"
#include "featpl/metrics.h"
#include "featpl/model.h"

namespace featpl {
namespace {

struct MetricValue {
  std::string name;
  double value = 0.0;
};

struct TrialResult {
  std::vector<MetricValue> metrics;
  double seconds = 0.0;
};

TrialResult RunTrial(const ExperimentConfig& config, int n, Rng rng) {
  SyntheticData data = GenerateSynthetic(config, n, rng);
  TrialResult result;
  const auto start = std::chrono::steady_clock::now();

  if (config.estimator == "mle") {
    const FitReport fit = FitBeta(data.profile, data.features, config.optimizer);
    result.metrics.push_back(
        {"param_mse", ParamMse(fit.beta_hat, data.truth.betas[0])});
  } else if (config.estimator == "em" || config.estimator == "direct") {
    EmOptions em = config.em;
    em.k = config.k;
    em.seed = rng.NextU64();
    MixtureParams estimate;
    double ll = 0.0;
    if (config.estimator == "em") {
      EmReport report = EmFit(data.profile, data.features, em);
      estimate = std::move(report.estimate);
      ll = report.log_likelihood_trace.back();
    } else {
      DirectMleReport report =
          DirectMixtureMle(data.profile, data.features, em.k, em);
      estimate = std::move(report.estimate);
      ll = report.log_likelihood;
    }
    const AlignedComponents aligned = AlignComponents(estimate, data.truth);
    result.metrics.push_back(
        {"aligned_mse", aligned.per_component_mse.mean()});
    result.metrics.push_back({"log_likelihood", ll});
  } else if (config.estimator == "rbcml") {
    const WeightingFunction weighting =
        config.weighting == WeightingKind::kHarmonic
            ? WeightingFunction::Harmonic()
            : WeightingFunction::Uniform();
    const FitReport fit = FitRbcml(data.profile, data.features, config.family,
                                   weighting, config.optimizer);
    result.metrics.push_back(
        {"param_mse", ParamMse(fit.beta_hat, data.truth.betas[0])});
  } else {
    throw DomainError("unknown estimator '" + config.estimator + "'");
  }

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace

LengthPolicy LengthPolicy::Fixed(int l) {
  LengthPolicy policy;
  policy.kind = Kind::kFixed;
  policy.fixed_length = l;
  return policy;
}

LengthPolicy LengthPolicy::FromPhi(Eigen::VectorXd phi) {
  LengthPolicy policy;
  policy.kind = Kind::kPhi;
  policy.phi = std::move(phi);
  return policy;
}

LengthPolicy LengthPolicy::LWay(double p) {
  LengthPolicy policy;
  policy.kind = Kind::kLWay;
  policy.subset_probability = p;
  return policy;
}

Eigen::VectorXd LengthPolicy::ToPhi(int num_alternatives) const {
  switch (kind) {
    case Kind::kFixed: {
      if (fixed_length < 1 || fixed_length > num_alternatives - 1) {
        throw DomainError("fixed order length " +
                          std::to_string(fixed_length) + " outside [1, " +
                          std::to_string(num_alternatives - 1) + "]");
      }
      Eigen::VectorXd phi = Eigen::VectorXd::Zero(num_alternatives - 1);
      phi[fixed_length - 1] = 1.0;
      return phi;
    }
    case Kind::kPhi:
      ValidatePhi(phi, num_alternatives);
      return phi;
    case Kind::kLWay:
      throw DomainError("an l-way policy has no top-l length distribution");
  }
  throw DomainError("bad length policy");
}

SyntheticData GenerateSynthetic(const ExperimentConfig& config, int n,
                                Rng& rng) {
  if (n < 1 || config.m < 2 || config.d < 1 || config.k < 1) {
    throw DomainError("need n >= 1, m >= 2, d >= 1, k >= 1");
  }
  if (!(config.feat_lo < config.feat_hi) ||
      !(config.beta_lo < config.beta_hi)) {
    throw DomainError("distribution bounds must satisfy low < high");
  }

  SyntheticData data;
  std::vector<Eigen::MatrixXd> agents(n);
  for (int j = 0; j < n; ++j) {
    agents[j] = Eigen::MatrixXd::NullaryExpr(
        config.d, config.m,
        [&](Eigen::Index, Eigen::Index) {
          return rng.Uniform(config.feat_lo, config.feat_hi);
        });
  }
  data.features = FeatureTensor(std::move(agents));

  data.truth.betas.resize(config.k);
  for (int r = 0; r < config.k; ++r) {
    data.truth.betas[r] = Eigen::VectorXd::NullaryExpr(
        config.d,
        [&](Eigen::Index) { return rng.Uniform(config.beta_lo, config.beta_hi); });
  }
  if (config.k == 1) {
    data.truth.alpha = Eigen::VectorXd::Ones(1);
  } else {
    Eigen::VectorXd raw = Eigen::VectorXd::NullaryExpr(
        config.k, [&](Eigen::Index) { return rng.Uniform(); });
    data.truth.alpha = raw / raw.sum();
  }

  const bool lway = config.length_policy.kind == LengthPolicy::Kind::kLWay;
  if (!lway) {
    data.truth.phi = config.length_policy.ToPhi(config.m);
  }

  data.profile.kind = lway ? OrderKind::kLWay : OrderKind::kTopL;
  data.profile.num_alternatives = config.m;
  data.profile.orders.reserve(n);
  for (int j = 0; j < n; ++j) {
    int component = 0;
    if (config.k > 1) {
      const double u = rng.Uniform();
      double cum = 0.0;
      for (int r = 0; r < config.k; ++r) {
        cum += data.truth.alpha[r];
        component = r;
        if (u < cum) break;
      }
    }
    const Eigen::VectorXd& beta = data.truth.betas[component];
    data.profile.orders.push_back(
        lway ? SampleLWay(data.features, j, beta,
                          config.length_policy.subset_probability, rng)
             : SampleTopL(data.features, j, beta, data.truth.phi, rng));
  }
  return data;
}

double CiHalfWidth(const std::vector<double>& samples) {
  const int count = static_cast<int>(samples.size());
  if (count < 2) return 0.0;
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= count;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / (count - 1));
  const boost::math::students_t dist(count - 1);
  return boost::math::quantile(dist, 0.975) * stddev / std::sqrt(count);
}

std::vector<ReportRow> RunSweep(const ExperimentConfig& config) {
  if (config.trials < 1) {
    throw DomainError("trials must be >= 1");
  }
  const int num_settings = static_cast<int>(config.n_values.size());
  const int total = num_settings * config.trials;
  std::vector<TrialResult> results(total);
  std::vector<std::string> errors(total);

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int threads =
      std::max(1, std::min(config.threads > 0 ? config.threads : hw, total));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const int n = config.n_values[idx / config.trials];
      try {
        results[idx] =
            RunTrial(config, n, Rng::ForStream(config.seed, idx));
      } catch (const std::exception& e) {
        errors[idx] = e.what();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (int idx = 0; idx < total; ++idx) {
    if (!errors[idx].empty()) {
      throw Error("trial " + std::to_string(idx % config.trials) + " at n = " +
                  std::to_string(config.n_values[idx / config.trials]) +
                  " failed: " + errors[idx]);
    }
  }

  std::vector<ReportRow> rows;
  for (int s = 0; s < num_settings; ++s) {
    const int n = config.n_values[s];
    // Per-trial rows.
    for (int t = 0; t < config.trials; ++t) {
      const TrialResult& trial = results[s * config.trials + t];
      for (const MetricValue& metric : trial.metrics) {
        rows.push_back({n, std::to_string(t), config.estimator, metric.name,
                        metric.value, std::nullopt, trial.seconds});
      }
    }
    // Aggregate rows.
    const TrialResult& first = results[s * config.trials];
    for (std::size_t mi = 0; mi < first.metrics.size(); ++mi) {
      std::vector<double> values(config.trials);
      double seconds = 0.0;
      for (int t = 0; t < config.trials; ++t) {
        const TrialResult& trial = results[s * config.trials + t];
        values[t] = trial.metrics[mi].value;
        seconds += trial.seconds;
      }
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= config.trials;
      rows.push_back({n, "all", config.estimator, first.metrics[mi].name,
                      mean, CiHalfWidth(values), seconds / config.trials});
    }
  }
  return rows;
}

}  // namespace featpl
