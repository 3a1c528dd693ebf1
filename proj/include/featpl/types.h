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

#ifndef FEATPL_TYPES_H_
#define FEATPL_TYPES_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "Eigen/Dense"

namespace featpl {

// Simplex membership (phi, alpha) is enforced to this absolute slack.
inline constexpr double kSimplexTol = 1e-12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between features, parameters, or orders.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter value (out-of-range probability, bad simplex, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A length-distribution entry is zero on an observed order length, so the
// log-likelihood is -inf.
class SupportError : public Error {
 public:
  using Error::Error;
};

// The optimizer escaped the divergence guard; the likelihood is unbounded
// (typically the sign-diversity boundedness condition fails).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Per-agent feature matrices. agent(j) is d-by-m; column i holds the feature
// vector of alternative i as seen by agent j. All agents share (d, m).
class FeatureTensor {
 public:
  FeatureTensor() = default;
  // Validates shapes and finiteness; throws DimensionError / DomainError.
  explicit FeatureTensor(std::vector<Eigen::MatrixXd> agents);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  int num_alternatives() const { return m_; }
  int num_features() const { return d_; }

  const Eigen::MatrixXd& agent(int j) const { return agents_[j]; }
  // Feature vector x of alternative i for agent j.
  Eigen::VectorXd alternative(int j, int i) const { return agents_[j].col(i); }

  // Difference between the largest and smallest entry over all agents.
  double Spread() const;

 private:
  std::vector<Eigen::MatrixXd> agents_;
  int m_ = 0;
  int d_ = 0;
};

// Separate agent/alternative features; utilities are bilinear forms
// z_i^T B y_j. Lifts to a FeatureTensor of dimension L*K (identifiability.h).
struct BilinearFeatures {
  Eigen::MatrixXd agent_features;        // L x n, column j = y_j
  Eigen::MatrixXd alternative_features;  // K x m, column i = z_i

  int num_agents() const { return static_cast<int>(agent_features.cols()); }
  int num_alternatives() const {
    return static_cast<int>(alternative_features.cols());
  }
};
void Validate(const BilinearFeatures& bilinear);

// One observation: a ranked list of distinct alternatives reported by one
// agent. Under kTopL the list is the agent's l most-preferred alternatives
// out of all m (1 <= l <= m-1, everything else implicitly below). Under
// kLWay the list is a complete ranking of an l-element subset (2 <= l <= m).
struct Order {
  int agent = 0;           // 0-based agent index into a FeatureTensor
  std::vector<int> items;  // 0-based alternative indices, most preferred first

  int length() const { return static_cast<int>(items.size()); }
};

enum class OrderKind { kTopL, kLWay };

// A dataset of orders over a common alternative set. Agent indices are
// carried per order, so a profile may contain several orders from one agent
// or none from another.
struct Profile {
  OrderKind kind = OrderKind::kTopL;
  int num_alternatives = 0;
  std::vector<Order> orders;

  int size() const { return static_cast<int>(orders.size()); }
};

// Throws unless the order has distinct in-range items and a length legal for
// its kind. num_agents < 0 skips the agent-range check.
void ValidateOrder(const Order& order, OrderKind kind, int num_alternatives,
                   int num_agents = -1);
// Validates every order against the profile header and the tensor shape.
void ValidateProfile(const Profile& profile, const FeatureTensor& features);

// Throws DomainError unless v is entrywise >= 0 and sums to 1 within
// kSimplexTol. `what` names the offending quantity in the message.
void ValidateSimplex(const Eigen::VectorXd& v, const char* what);

// Length distribution over top-l orders: phi[l-1] is the probability of
// reporting a top-l order, l in 1..m-1.
void ValidatePhi(const Eigen::VectorXd& phi, int num_alternatives);

// Parameters of a k-component mixture. betas[r] has the feature dimension d;
// alpha lives on the k-simplex; phi on the (m-1)-simplex.
struct MixtureParams {
  Eigen::VectorXd alpha;
  std::vector<Eigen::VectorXd> betas;
  Eigen::VectorXd phi;

  int num_components() const { return static_cast<int>(betas.size()); }
};
void Validate(const MixtureParams& params, int num_alternatives);

}  // namespace featpl

#endif  // FEATPL_TYPES_H_
