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

#include "featpl/types.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace featpl {
namespace {

std::string Shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

FeatureTensor::FeatureTensor(std::vector<Eigen::MatrixXd> agents)
    : agents_(std::move(agents)) {
  if (agents_.empty()) {
    throw DimensionError("feature tensor needs at least one agent");
  }
  d_ = static_cast<int>(agents_[0].rows());
  m_ = static_cast<int>(agents_[0].cols());
  if (d_ < 1 || m_ < 2) {
    throw DimensionError("feature tensor needs d >= 1 and m >= 2, got " +
                         Shape(agents_[0]));
  }
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    const Eigen::MatrixXd& x = agents_[j];
    if (x.rows() != d_ || x.cols() != m_) {
      throw DimensionError("agent " + std::to_string(j) + " features are " +
                           Shape(x) + ", expected " + std::to_string(d_) +
                           "x" + std::to_string(m_));
    }
    if (!x.allFinite()) {
      throw DomainError("agent " + std::to_string(j) +
                        " features contain a non-finite entry");
    }
  }
}

double FeatureTensor::Spread() const {
  double lo = agents_[0](0, 0);
  double hi = lo;
  for (const Eigen::MatrixXd& x : agents_) {
    lo = std::min(lo, x.minCoeff());
    hi = std::max(hi, x.maxCoeff());
  }
  return hi - lo;
}

void Validate(const BilinearFeatures& bilinear) {
  if (bilinear.agent_features.rows() < 1 ||
      bilinear.agent_features.cols() < 1) {
    throw DimensionError("agent feature matrix must be at least 1x1");
  }
  if (bilinear.alternative_features.rows() < 1 ||
      bilinear.alternative_features.cols() < 2) {
    throw DimensionError(
        "alternative feature matrix needs K >= 1 rows and m >= 2 columns");
  }
  if (!bilinear.agent_features.allFinite() ||
      !bilinear.alternative_features.allFinite()) {
    throw DomainError("bilinear features contain a non-finite entry");
  }
}

void ValidateOrder(const Order& order, OrderKind kind, int num_alternatives,
                   int num_agents) {
  const int m = num_alternatives;
  const int l = order.length();
  if (num_agents >= 0 && (order.agent < 0 || order.agent >= num_agents)) {
    throw DimensionError("order agent index " + std::to_string(order.agent) +
                         " out of range [0, " + std::to_string(num_agents) +
                         ")");
  }
  if (kind == OrderKind::kTopL) {
    if (l < 1 || l > m - 1) {
      throw DimensionError("top-l order length " + std::to_string(l) +
                           " outside [1, " + std::to_string(m - 1) + "]");
    }
  } else {
    if (l < 2 || l > m) {
      throw DimensionError("l-way order length " + std::to_string(l) +
                           " outside [2, " + std::to_string(m) + "]");
    }
  }
  std::vector<bool> seen(m, false);
  for (int i : order.items) {
    if (i < 0 || i >= m) {
      throw DimensionError("alternative index " + std::to_string(i) +
                           " out of range [0, " + std::to_string(m) + ")");
    }
    if (seen[i]) {
      throw DimensionError("alternative " + std::to_string(i) +
                           " appears twice in one order");
    }
    seen[i] = true;
  }
}

void ValidateProfile(const Profile& profile, const FeatureTensor& features) {
  if (profile.orders.empty()) {
    throw DimensionError("profile is empty");
  }
  if (profile.num_alternatives != features.num_alternatives()) {
    throw DimensionError(
        "profile is over " + std::to_string(profile.num_alternatives) +
        " alternatives but the feature tensor has " +
        std::to_string(features.num_alternatives()));
  }
  for (const Order& order : profile.orders) {
    ValidateOrder(order, profile.kind, profile.num_alternatives,
                  features.num_agents());
  }
}

void ValidateSimplex(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) {
    throw DomainError(std::string(what) + " is empty");
  }
  if (!v.allFinite() || v.minCoeff() < 0.0) {
    throw DomainError(std::string(what) + " has a negative or non-finite entry");
  }
  if (std::abs(v.sum() - 1.0) > kSimplexTol) {
    throw DomainError(std::string(what) + " sums to " + std::to_string(v.sum()) +
                      ", expected 1");
  }
}

void ValidatePhi(const Eigen::VectorXd& phi, int num_alternatives) {
  if (phi.size() != num_alternatives - 1) {
    throw DimensionError("phi has length " + std::to_string(phi.size()) +
                         ", expected m-1 = " +
                         std::to_string(num_alternatives - 1));
  }
  ValidateSimplex(phi, "phi");
}

void Validate(const MixtureParams& params, int num_alternatives) {
  const int k = params.num_components();
  if (k < 1) {
    throw DimensionError("mixture needs at least one component");
  }
  if (params.alpha.size() != k) {
    throw DimensionError("alpha has length " +
                         std::to_string(params.alpha.size()) + " but " +
                         std::to_string(k) + " components are given");
  }
  ValidateSimplex(params.alpha, "alpha");
  const Eigen::Index d = params.betas[0].size();
  for (const Eigen::VectorXd& beta : params.betas) {
    if (beta.size() != d) {
      throw DimensionError("mixture components disagree on feature dimension");
    }
    if (!beta.allFinite()) {
      throw DomainError("mixture component has a non-finite entry");
    }
  }
  // phi is optional here (pairwise metrics never touch it); operations that
  // need a length distribution validate it at the call site.
  if (params.phi.size() != 0) {
    ValidatePhi(params.phi, num_alternatives);
  }
}

}  // namespace featpl
