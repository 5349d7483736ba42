// Copyright 2026 The alipmpc Authors
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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "alipmpc/constraints.hpp"

namespace alipmpc {

/// min 1/2 U^T H U + f^T U  s.t.  A U <= b (rows of `constraints`).
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  LinearInequalitySet constraints;
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations };

const char* to_string(QpStatus status);

/// Scale-normalised KKT residuals:
///   primal          max(0, max_i a_i^T x - b_i) / max(1, |b|_inf)
///   dual            max(|H x + f + A^T lambda|_inf, max(0, -min lambda))
///                   / max(1, |f|_inf, |H x|_inf, |A^T lambda|_inf)
///   complementarity max_i |lambda_i (b_i - a_i^T x)|
///                   / (max(1, |lambda|_inf) max(1, |b|_inf))
struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  bool within_contract() const {
    return primal <= 1e-6 && dual <= 1e-6 && complementarity <= 1e-8;
  }
};

struct QpSolution {
  Eigen::VectorXd primal;
  Eigen::VectorXd multipliers;  // one per inequality row, zero when inactive
  std::vector<int> active_set;  // row indices, in order of activation
  QpStatus status = QpStatus::kMaxIterations;
  KktResiduals residuals;
  int iterations = 0;
  double objective = 0.0;       // 1/2 x^T H x + f^T x
  bool warm_started = false;    // warm-start set was accepted as the initial working set
  /// For kInfeasible: rows whose nonnegative combination proves emptiness.
  std::vector<int> certificate;
};

struct QpOptions {
  int max_iterations = 0;        // 0 selects 10 * (rows + vars) + 100
  double violation_tol = 1e-10;  // relative to 1 + |b_i|
};

/// Dual active-set method. The Hessian must be symmetric positive definite
/// (add regularisation for PSD problems). `warm_start` lists rows to try as
/// the initial working set.
QpSolution solve_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                    const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    std::span<const int> warm_start = {},
                    const QpOptions& options = {});

QpSolution solve_qp(const QpProblem& qp, std::span<const int> warm_start = {},
                    const QpOptions& options = {});

KktResiduals kkt_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                           const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lambda);

}  // namespace alipmpc
