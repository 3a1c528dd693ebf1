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

#ifndef FEATPL_OPTIMIZE_H_
#define FEATPL_OPTIMIZE_H_

#include <functional>

#include "Eigen/Dense"
#include "featpl/types.h"

namespace featpl {

// Objective callback: returns the value at x and, when grad is non-null,
// writes the gradient into *grad.
using Objective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
  int max_iters = 500;
  // Converged when the gradient's max-norm drops to grad_tol (absolute,
  // callers rescale for per-sample tolerances).
  double grad_tol = 1e-8;
  // Armijo sufficient-increase constant and backtracking shrink factor.
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  // Throws DivergenceError once the iterate's max-norm passes this bound.
  double iterate_bound = 1e6;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

// Maximizes a smooth objective by BFGS (inverse-Hessian update) with
// backtracking line search. The objective value never decreases between
// iterations. Throws DivergenceError via the iterate bound when the
// objective is unbounded above.
BfgsResult MaximizeBfgs(const Objective& objective, Eigen::VectorXd x0,
                        const BfgsOptions& options);

}  // namespace featpl

#endif  // FEATPL_OPTIMIZE_H_
