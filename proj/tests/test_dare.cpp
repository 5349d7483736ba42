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

#include <cmath>

#include <gtest/gtest.h>

#include "alipmpc/dare.hpp"
#include "alipmpc/errors.hpp"
#include "alipmpc/mpc.hpp"
#include "oracles.hpp"

namespace alipmpc {
namespace {

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

TEST(Dare, ZeroWeightGivesZero) {
  const auto r = dare_terminal_cost(RobotParams{}, TerrainPlane{}, Eigen::Matrix4d::Zero());
  EXPECT_EQ(r.P.cwiseAbs().maxCoeff(), 0.0);
}

// Scalar case has the closed form P = (q + (a^2-1) r + sqrt(...)) / 2 from
// P^2 - (q + (a^2 - 1) r) P - q r = 0.
TEST(Dare, ScalarClosedForm) {
  for (double a : {0.5, 1.0, 2.0, 3.5}) {
    for (double q : {0.1, 1.0, 10.0}) {
      const double rr = 0.3;
      const double bq = q + (a * a - 1.0) * rr;
      const double P = 0.5 * (bq + std::sqrt(bq * bq + 4.0 * q * rr));
      const auto res = solve_dare_iterative(Eigen::MatrixXd::Constant(1, 1, a),
                                            Eigen::MatrixXd::Constant(1, 1, 1.0),
                                            Eigen::MatrixXd::Constant(1, 1, q),
                                            Eigen::MatrixXd::Constant(1, 1, rr),
                                            Eigen::MatrixXd::Zero(1, 1));
      EXPECT_NEAR(res.P(0, 0), P, 1e-9 * std::max(1.0, P)) << a << " " << q;
    }
  }
}

TEST(Dare, MatchesValueIterationIdentityWeight) {
  const RobotParams p;
  const TerrainPlane t;
  const auto r = dare_terminal_cost(p, t, Eigen::Matrix4d::Identity());
  const StepMap map = step_to_step_map(p, t);
  const Eigen::MatrixXd ref = oracle::value_iteration(map.A_d, map.B_d, Eigen::Matrix4d::Identity(),
                                                      1e-9 * Eigen::Matrix2d::Identity(), 500);
  EXPECT_LE((r.P - ref).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Dare, MatchesValueIterationDefaultWeight) {
  const RobotParams p;
  const TerrainPlane t;
  const auto r = dare_terminal_cost(p, t, default_step_weight());
  const StepMap map = step_to_step_map(p, t);
  const Eigen::MatrixXd ref = oracle::value_iteration(map.A_d, map.B_d, default_step_weight(),
                                                      1e-9 * Eigen::Matrix2d::Identity(), 500);
  EXPECT_LE((r.P - ref).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Dare, SymmetricPsd) {
  for (const Eigen::Matrix4d& Q : {Eigen::Matrix4d(Eigen::Matrix4d::Identity()),
                                   default_step_weight()}) {
    const auto r = dare_terminal_cost(RobotParams{}, TerrainPlane{}, Q);
    EXPECT_EQ(r.P, r.P.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.P);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Dare, LiftedAgreesWithOneStep) {
  const RobotParams p;
  const TerrainPlane t;
  for (const Eigen::Matrix4d& Q : {Eigen::Matrix4d(Eigen::Matrix4d::Identity()),
                                   default_step_weight()}) {
    const auto one = dare_terminal_cost(p, t, Q, TerminalCostMode::kOneStep);
    const auto two = dare_terminal_cost(p, t, Q, TerminalCostMode::kTwoStepLifted);
    EXPECT_LE(rel_err(two.P, one.P), 1e-8);
    EXPECT_LE(two.residual, 1e-10 * std::max(1.0, two.P.cwiseAbs().maxCoeff()));
  }
}

TEST(Dare, StepMapStructure) {
  const RobotParams p;
  const TerrainPlane t;
  const StepMap map = step_to_step_map(p, t);
  EXPECT_EQ(map.A_d, step_transition(p, t, p.step_period));
  EXPECT_LE((map.B_d + map.A_d.leftCols<2>()).norm(), 1e-15);
}

TEST(Dare, Errors) {
  EXPECT_THROW(dare_terminal_cost(RobotParams{}, TerrainPlane{}, Eigen::Matrix4d::Identity(),
                                  TerminalCostMode::kOneStep, 0.0),
               InvalidArgument);
  // unstabilisable: unstable mode with no input authority
  Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 2.0);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_THROW(solve_dare_iterative(A, B, Eigen::MatrixXd::Constant(1, 1, 1.0),
                                    Eigen::MatrixXd::Constant(1, 1, 1.0),
                                    Eigen::MatrixXd::Zero(1, 1), 1e-10, 2000),
               DivergenceError);
  EXPECT_THROW(solve_dare_iterative(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(3, 1),
                                    Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(2, 1)),
               InvalidArgument);
}

}  // namespace
}  // namespace alipmpc
