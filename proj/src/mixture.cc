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
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "featpl/model.h"
#include "featpl/rng.h"

namespace featpl {
namespace {

// Per-order component likelihood floor for responsibility ratios.
const double kLikelihoodFloorLog = std::log(1e-300);
constexpr double kAlphaCollapse = 1e-12;

double Seconds(std::chrono::steady_clock::time_point from,
               std::chrono::steady_clock::time_point to) {
  return std::chrono::duration<double>(to - from).count();
}

// logP[j][r] = ln Pr(O_j | beta_r), floored.
Eigen::MatrixXd ComponentLogProbs(const Profile& profile,
                                  const FeatureTensor& features,
                                  const std::vector<Eigen::VectorXd>& betas) {
  const int n = profile.size();
  const int k = static_cast<int>(betas.size());
  Eigen::MatrixXd log_probs(n, k);
  for (int j = 0; j < n; ++j) {
    const Order& order = profile.orders[j];
    for (int r = 0; r < k; ++r) {
      const double lp = profile.kind == OrderKind::kTopL
                            ? LogTopLProbability(features, order, betas[r])
                            : LogLWayProbability(features, order, betas[r]);
      log_probs(j, r) = std::max(lp, kLikelihoodFloorLog);
    }
  }
  return log_probs;
}

Eigen::MatrixXd ResponsibilitiesFromLogProbs(const Eigen::MatrixXd& log_probs,
                                             const Eigen::VectorXd& alpha) {
  const int n = static_cast<int>(log_probs.rows());
  const int k = static_cast<int>(log_probs.cols());
  Eigen::MatrixXd w(n, k);
  Eigen::VectorXd scores(k);
  for (int j = 0; j < n; ++j) {
    for (int r = 0; r < k; ++r) {
      scores[r] = alpha[r] > 0.0 ? std::log(alpha[r]) + log_probs(j, r)
                                 : -std::numeric_limits<double>::infinity();
    }
    const double top = scores.maxCoeff();
    double total = 0.0;
    for (int r = 0; r < k; ++r) {
      const double e = std::exp(scores[r] - top);
      w(j, r) = e;
      total += e;
    }
    w.row(j) /= total;
  }
  return w;
}

double MixtureLogLikelihoodFromLogProbs(const Profile& profile,
                                        const Eigen::MatrixXd& log_probs,
                                        const Eigen::VectorXd& alpha,
                                        const Eigen::VectorXd& phi) {
  const int k = static_cast<int>(log_probs.cols());
  Eigen::VectorXd scores(k);
  double ll = 0.0;
  for (int j = 0; j < static_cast<int>(log_probs.rows()); ++j) {
    for (int r = 0; r < k; ++r) {
      scores[r] = alpha[r] > 0.0 ? std::log(alpha[r]) + log_probs(j, r)
                                 : -std::numeric_limits<double>::infinity();
    }
    const double top = scores.maxCoeff();
    double total = 0.0;
    for (int r = 0; r < k; ++r) total += std::exp(scores[r] - top);
    ll += top + std::log(total);
    if (phi.size() > 0) {
      const double phi_l = phi[profile.orders[j].length() - 1];
      if (phi_l <= 0.0) {
        throw SupportError("phi is zero at an observed order length");
      }
      ll += std::log(phi_l);
    }
  }
  return ll;
}

struct EmRun {
  EmReport report;
  double final_ll = -std::numeric_limits<double>::infinity();
};

EmRun RunEmOnce(const Profile& profile, const FeatureTensor& features,
                const EmOptions& options, const Eigen::VectorXd& phi_hat,
                Rng& rng) {
  const int n = profile.size();
  const int k = options.k;
  const int d = features.num_features();

  MixtureParams params;
  params.alpha = Eigen::VectorXd::Constant(k, 1.0 / k);
  params.betas.resize(k);
  for (int r = 0; r < k; ++r) {
    params.betas[r] = Eigen::VectorXd::NullaryExpr(
        d, [&](Eigen::Index) { return rng.Uniform(options.init_lo, options.init_hi); });
  }
  params.phi = phi_hat;

  EmRun run;
  EmReport& report = run.report;
  std::vector<bool> frozen(k, false);
  Eigen::MatrixXd responsibilities;
  double previous_ll = -std::numeric_limits<double>::infinity();
  // Log-probs depend only on the betas, so the matrix computed for the
  // iteration trace doubles as the next E-step input.
  Eigen::MatrixXd log_probs = ComponentLogProbs(profile, features, params.betas);

  for (int iter = 0; iter < options.iterations; ++iter) {
    const auto e_start = std::chrono::steady_clock::now();
    responsibilities = ResponsibilitiesFromLogProbs(log_probs, params.alpha);
    const auto e_end = std::chrono::steady_clock::now();
    report.e_step_seconds += Seconds(e_start, e_end);

    const auto m_start = std::chrono::steady_clock::now();
    params.alpha = MStepAlpha(responsibilities);
    for (int r = 0; r < k; ++r) {
      if (frozen[r]) continue;
      if (params.alpha[r] < kAlphaCollapse) {
        frozen[r] = true;
        report.collapsed.push_back(r);
        continue;
      }
      OptimizerOptions inner = options.inner;
      inner.initial_beta = params.betas[r];  // warm start
      params.betas[r] =
          FitBetaWeighted(profile, features, responsibilities.col(r), inner);
    }
    report.m_step_seconds +=
        Seconds(m_start, std::chrono::steady_clock::now());

    log_probs = ComponentLogProbs(profile, features, params.betas);
    const double ll = MixtureLogLikelihoodFromLogProbs(
        profile, log_probs, params.alpha, phi_hat);
    report.log_likelihood_trace.push_back(ll);
    report.iterations = iter + 1;
    if (iter > 0 && ll - previous_ll < options.ll_gain_tol) {
      report.early_stopped = true;
      previous_ll = ll;
      break;
    }
    previous_ll = ll;
  }

  report.estimate = std::move(params);
  report.responsibilities = std::move(responsibilities);
  run.final_ll = previous_ll;
  return run;
}

}  // namespace

double MixtureLogLikelihood(const Profile& profile,
                            const FeatureTensor& features,
                            const MixtureParams& params) {
  ValidateProfile(profile, features);
  Validate(params, features.num_alternatives());
  if (profile.kind == OrderKind::kTopL) {
    ValidatePhi(params.phi, features.num_alternatives());
  }
  const Eigen::VectorXd phi =
      profile.kind == OrderKind::kTopL ? params.phi : Eigen::VectorXd();
  return MixtureLogLikelihoodFromLogProbs(
      profile, ComponentLogProbs(profile, features, params.betas),
      params.alpha, phi);
}

Eigen::MatrixXd EStep(const Profile& profile, const FeatureTensor& features,
                      const MixtureParams& params) {
  ValidateProfile(profile, features);
  Validate(params, features.num_alternatives());
  return ResponsibilitiesFromLogProbs(
      ComponentLogProbs(profile, features, params.betas), params.alpha);
}

Eigen::VectorXd MStepAlpha(const Eigen::MatrixXd& responsibilities) {
  if (responsibilities.rows() == 0) {
    throw DimensionError("responsibility matrix is empty");
  }
  return responsibilities.colwise().mean();
}

EmReport EmFit(const Profile& profile, const FeatureTensor& features,
               const EmOptions& options) {
  ValidateProfile(profile, features);
  if (options.k < 1 || options.iterations < 1 || options.restarts < 1) {
    throw DomainError("EM needs k >= 1, iterations >= 1, restarts >= 1");
  }
  const Eigen::VectorXd phi_hat = profile.kind == OrderKind::kTopL
                                      ? EstimatePhi(profile)
                                      : Eigen::VectorXd();

  EmRun best;
  for (int restart = 0; restart < options.restarts; ++restart) {
    Rng rng = Rng::ForStream(options.seed, restart);
    EmRun run = RunEmOnce(profile, features, options, phi_hat, rng);
    if (restart == 0 || run.final_ll > best.final_ll) {
      best = std::move(run);
    }
  }
  return best.report;
}

DirectMleReport DirectMixtureMle(const Profile& profile,
                                 const FeatureTensor& features, int k,
                                 const EmOptions& options) {
  ValidateProfile(profile, features);
  if (k < 1) {
    throw DomainError("mixture size must be >= 1");
  }
  const int n = profile.size();
  const int d = features.num_features();
  const Eigen::VectorXd phi_hat = profile.kind == OrderKind::kTopL
                                      ? EstimatePhi(profile)
                                      : Eigen::VectorXd();

  // Parameter layout: k softmax logits, then the k stacked components.
  const auto unpack = [&](const Eigen::VectorXd& v) {
    MixtureParams params;
    const Eigen::VectorXd logits = v.head(k);
    const double top = logits.maxCoeff();
    Eigen::VectorXd alpha = (logits.array() - top).exp();
    params.alpha = alpha / alpha.sum();
    params.betas.resize(k);
    for (int r = 0; r < k; ++r) {
      params.betas[r] = v.segment(k + static_cast<Eigen::Index>(r) * d, d);
    }
    params.phi = phi_hat;
    return params;
  };

  const Objective objective = [&](const Eigen::VectorXd& v,
                                  Eigen::VectorXd* grad) {
    const MixtureParams params = unpack(v);
    const Eigen::MatrixXd log_probs =
        ComponentLogProbs(profile, features, params.betas);
    if (grad != nullptr) {
      const Eigen::MatrixXd w =
          ResponsibilitiesFromLogProbs(log_probs, params.alpha);
      grad->resize(v.size());
      // d/d logit_s = sum_j (w_js - alpha_s).
      grad->head(k) =
          w.colwise().sum().transpose() - n * params.alpha;
      for (int r = 0; r < k; ++r) {
        grad->segment(k + static_cast<Eigen::Index>(r) * d, d) =
            WeightedGradBeta(profile, features, params.betas[r], w.col(r));
      }
    }
    return MixtureLogLikelihoodFromLogProbs(profile, log_probs, params.alpha,
                                            phi_hat);
  };

  Rng rng = Rng::ForStream(options.seed, 0x4d4cu);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(k + static_cast<Eigen::Index>(k) * d);
  for (Eigen::Index i = k; i < v0.size(); ++i) {
    v0[i] = rng.Uniform(options.init_lo, options.init_hi);
  }

  const BfgsResult solution =
      MaximizeBfgs(objective, std::move(v0), options.inner.ToBfgs(n));

  DirectMleReport report;
  report.estimate = unpack(solution.x);
  report.log_likelihood = solution.value;
  report.iterations = solution.iterations;
  report.converged = solution.converged;
  return report;
}

AlignedComponents AlignComponents(const MixtureParams& estimate,
                                  const MixtureParams& truth) {
  const int k = estimate.num_components();
  if (truth.num_components() != k) {
    throw DimensionError("component counts differ: " + std::to_string(k) +
                         " vs " + std::to_string(truth.num_components()));
  }
  if (k > 8) {
    throw DomainError("exhaustive alignment supports k <= 8");
  }
  const int d = static_cast<int>(estimate.betas[0].size());

  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int r = 0; r < k; ++r) {
      cost += (estimate.betas[perm[r]] - truth.betas[r]).squaredNorm();
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  AlignedComponents aligned;
  aligned.permutation = best_perm;
  aligned.total_squared_error = best_cost;
  aligned.estimate.alpha.resize(k);
  aligned.estimate.betas.resize(k);
  aligned.estimate.phi = estimate.phi;
  aligned.per_component_mse.resize(k);
  for (int r = 0; r < k; ++r) {
    aligned.estimate.alpha[r] = estimate.alpha[best_perm[r]];
    aligned.estimate.betas[r] = estimate.betas[best_perm[r]];
    aligned.per_component_mse[r] =
        (aligned.estimate.betas[r] - truth.betas[r]).squaredNorm() / d;
  }
  return aligned;
}

}  // namespace featpl
