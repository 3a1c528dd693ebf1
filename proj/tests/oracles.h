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
// Test-only reference implementations, kept independent of the library's
// evaluation paths: naive probability products in the plain (non-log)
// domain, exhaustive order enumeration, finite differences, and quadrature.

#ifndef FEATPL_TESTS_ORACLES_H_
#define FEATPL_TESTS_ORACLES_H_

#include <functional>
#include <vector>

#include "Eigen/Dense"
#include "featpl/rng.h"
#include "featpl/types.h"

namespace featpl::oracles {

// All top-l orders over m alternatives for every l in [1, m-1]; the agent
// field is filled with `agent`.
std::vector<Order> EnumerateTopLOrders(int m, int agent);

// All rankings of every subset of size >= 2 (l-way orders).
std::vector<Order> EnumerateLWayOrders(int m, int agent);

// Naive top-l probability: explicit product of softmax factors computed
// with direct exponentials and per-coordinate summation loops.
double NaiveTopLProbability(const FeatureTensor& features, const Order& order,
                            const Eigen::VectorXd& beta);

// Naive within-subset ranking probability for an l-way order.
double NaiveLWayProbability(const FeatureTensor& features, const Order& order,
                            const Eigen::VectorXd& beta);

// Central finite-difference gradient of f at x with step h.
Eigen::VectorXd FiniteDifferenceGradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h);

// Central finite-difference Jacobian of a vector function (used to check
// the Hessian against the analytic gradient).
Eigen::MatrixXd FiniteDifferenceJacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h);

// P(noise2 - noise1 < gap) for two independent unit Gaussians, by composite
// Simpson quadrature of integral phi(u) Phi(gap + u) du; absolute error
// comfortably below 1e-10.
double GaussianRaceProbability(double gap);

// Random uniform feature tensor, entries in [lo, hi].
FeatureTensor RandomFeatures(int n, int m, int d, double lo, double hi,
                             Rng& rng);

// Random vector with entries uniform in [lo, hi].
Eigen::VectorXd RandomVector(int d, double lo, double hi, Rng& rng);

// Random point on the simplex (uniform draws, normalized), entries > 0.
Eigen::VectorXd RandomSimplex(int k, Rng& rng);

// Upper-tail chi-square critical value via Wilson-Hilferty; good to a few
// permille, enough for 3-sigma-style test gates.
double ChiSquareCritical95(int dof);

}  // namespace featpl::oracles

#endif  // FEATPL_TESTS_ORACLES_H_
