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

#include "alipmpc/dare.hpp"

#include <algorithm>
#include <string>

#include "alipmpc/errors.hpp"

namespace alipmpc {

Eigen::MatrixXd riccati_map(const Eigen::MatrixXd& P, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                            const Eigen::MatrixXd& R, const Eigen::MatrixXd& S) {
  const Eigen::MatrixXd PB = P * B;
  const Eigen::MatrixXd G = A.transpose() * PB + S;
  const Eigen::MatrixXd K = (B.transpose() * PB + R).ldlt().solve(G.transpose());
  Eigen::MatrixXd next = Q + A.transpose() * P * A - G * K;
  return 0.5 * (next + next.transpose());
}

DareResult solve_dare_iterative(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& S, double tol,
                                int max_iterations) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols() || S.rows() != n ||
      S.cols() != B.cols()) {
    throw InvalidArgument("solve_dare_iterative: dimension mismatch");
  }
  DareResult out;
  Eigen::MatrixXd P = 0.5 * (Q + Q.transpose());
  for (int k = 1; k <= max_iterations; ++k) {
    Eigen::MatrixXd next = riccati_map(P, A, B, Q, R, S);
    if (!next.allFinite()) {
      throw DivergenceError("Riccati iteration produced non-finite values");
    }
    const double step = (next - P).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    P = std::move(next);
    if (step <= tol * scale) {
      out.iterations = k;
      out.P = P;
      out.residual = (riccati_map(P, A, B, Q, R, S) - P).cwiseAbs().maxCoeff();
      return out;
    }
  }
  throw DivergenceError("Riccati iteration did not converge in " +
                        std::to_string(max_iterations) + " iterations");
}

StepMap step_to_step_map(const RobotParams& params, const TerrainPlane& terrain) {
  StepMap map;
  map.A_d = step_transition(params, terrain, params.step_period);
  map.B_d = map.A_d * impact_matrix();
  return map;
}

DareResult dare_terminal_cost(const RobotParams& params,
                              const TerrainPlane& terrain,
                              const Eigen::Matrix4d& Q_step,
                              TerminalCostMode mode, double regularization) {
  if (!(regularization > 0.0)) {
    throw InvalidArgument("dare_terminal_cost: regularization must be positive");
  }
  const StepMap map = step_to_step_map(params, terrain);
  if (mode == TerminalCostMode::kOneStep) {
    return solve_dare_iterative(map.A_d, map.B_d, Q_step,
                                regularization * Eigen::Matrix2d::Identity(),
                                Eigen::Matrix<double, 4, 2>::Zero());
  }

  // Two steps per stage: e1 = A_d e0 + B_d u0 is charged Q_step as well.
  const Eigen::Matrix4d A2 = map.A_d * map.A_d;
  Eigen::Matrix4d B2;
  B2 << map.A_d * map.B_d, map.B_d;
  const Eigen::Matrix4d Q2 = Q_step + map.A_d.transpose() * Q_step * map.A_d;
  Eigen::Matrix4d S2 = Eigen::Matrix4d::Zero();
  S2.leftCols<2>() = map.A_d.transpose() * Q_step * map.B_d;
  Eigen::Matrix4d R2 = regularization * Eigen::Matrix4d::Identity();
  R2.topLeftCorner<2, 2>() += map.B_d.transpose() * Q_step * map.B_d;
  return solve_dare_iterative(A2, B2, Q2, R2, S2);
}

}  // namespace alipmpc
