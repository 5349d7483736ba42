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

#include <Eigen/Dense>

#include "alipmpc/alip_model.hpp"

namespace alipmpc {

enum class TerminalCostMode {
  kOneStep,        // (A_d, A_d B) over one step period
  kTwoStepLifted,  // (A_d^2, [A_d^2 B, A_d B]) with stage cost at both impacts
};

struct DareResult {
  Eigen::MatrixXd P;
  double residual = 0.0;  // |P - Ric(P)|_inf at the returned P
  int iterations = 0;
};

/// One application of the Riccati map with cross term S (x-u weight):
///   Q + A'PA - (A'PB + S)(B'PB + R)^-1 (B'PA + S').
Eigen::MatrixXd riccati_map(const Eigen::MatrixXd& P, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                            const Eigen::MatrixXd& R, const Eigen::MatrixXd& S);

/// Value iteration from P = Q until successive iterates differ by at most
/// tol * max(1, |P|_inf) in the max norm. Throws DivergenceError after
/// max_iterations.
DareResult solve_dare_iterative(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& S, double tol = 1e-10,
                                int max_iterations = 100000);

/// Step-to-step error dynamics e+ = A_d (e + B u) with A_d = exp(A T_s).
struct StepMap {
  Eigen::Matrix4d A_d;
  Eigen::Matrix<double, 4, 2> B_d;
};

StepMap step_to_step_map(const RobotParams& params, const TerrainPlane& terrain);

/// Terminal weight for the foot-placement MPC: the infinite-horizon cost-to-go
/// of the step-to-step error dynamics with stage weight Q_step and input
/// weight regularization * I.
DareResult dare_terminal_cost(const RobotParams& params,
                              const TerrainPlane& terrain,
                              const Eigen::Matrix4d& Q_step,
                              TerminalCostMode mode = TerminalCostMode::kOneStep,
                              double regularization = 1e-9);

}  // namespace alipmpc
