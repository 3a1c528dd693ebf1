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

#include "featpl/optimize.h"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace featpl {

BfgsResult MaximizeBfgs(const Objective& objective, Eigen::VectorXd x0,
                        const BfgsOptions& options) {
  const Eigen::Index dim = x0.size();
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd grad(dim);
  double value = objective(x, &grad);
  if (!std::isfinite(value)) {
    throw DomainError("objective is non-finite at the initial point");
  }

  // Inverse-Hessian approximation of the negated (convex) problem.
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd grad_next(dim);

  BfgsResult result;
  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd direction = h_inv * grad;  // ascent direction
    double slope = grad.dot(direction);
    if (slope <= 0.0) {
      // Numerical breakdown of the curvature approximation; restart from
      // steepest ascent.
      h_inv.setIdentity();
      direction = grad;
      slope = grad.dot(grad);
    }

    // Backtracking until the Armijo sufficient-increase condition holds.
    double step = 1.0;
    double value_next = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_next;
    bool improved = false;
    while (step > 1e-20) {
      x_next = x + step * direction;
      value_next = objective(x_next, nullptr);
      if (std::isfinite(value_next) &&
          value_next >= value + options.armijo_c * step * slope) {
        improved = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!improved) break;  // no representable step improves the objective

    if (x_next.lpNorm<Eigen::Infinity>() > options.iterate_bound) {
      throw DivergenceError(
          "iterate max-norm exceeded " + std::to_string(options.iterate_bound) +
          "; the objective appears unbounded above");
    }

    value_next = objective(x_next, &grad_next);
    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = grad_next - grad;  // note: ascent, y = g+ - g
    const double sy = -s.dot(y);  // curvature of the negated problem
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      // h_inv <- (I - rho s yn^T) h_inv (I - rho yn s^T) + rho s s^T with
      // yn = -y, the gradient change of the negated problem.
      const Eigen::VectorXd hy = h_inv * (-y);
      const double yhy = (-y).dot(hy);
      h_inv += (rho * rho * yhy + rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }

    x = std::move(x_next);
    grad = grad_next;
    value = value_next;
  }

  result.x = std::move(x);
  result.value = value;
  result.gradient = std::move(grad);
  result.iterations = iter;
  result.converged =
      result.converged ||
      result.gradient.lpNorm<Eigen::Infinity>() <= options.grad_tol;
  return result;
}

}  // namespace featpl
