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
#include <random>

#include <gtest/gtest.h>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/errors.hpp"
#include "alipmpc/reference.hpp"
#include "oracles.hpp"

namespace alipmpc {
namespace {

RobotParams default_robot() { return RobotParams{}; }

TEST(AlipMatrix, DefaultEntries) {
  const Eigen::Matrix4d A = alip_matrix(default_robot(), TerrainPlane{});
  EXPECT_DOUBLE_EQ(A(3, 0), 313.92);
  EXPECT_DOUBLE_EQ(A(0, 3), 0.0390625);
  EXPECT_DOUBLE_EQ(A(1, 2), -0.0390625);
  EXPECT_DOUBLE_EQ(A(2, 1), -313.92);
  EXPECT_EQ(A.trace(), 0.0);
  // decoupled blocks (x_c, L_y) and (y_c, L_x)
  for (int i : {0, 3}) {
    for (int j : {1, 2}) {
      EXPECT_EQ(A(i, j), 0.0);
      EXPECT_EQ(A(j, i), 0.0);
    }
  }
}

TEST(AlipMatrix, RejectsBadParameters) {
  RobotParams p;
  p.mass = 0.0;
  EXPECT_THROW(alip_matrix(p, TerrainPlane{}), InvalidArgument);
  p = RobotParams{};
  p.gravity = -1.0;
  EXPECT_THROW(alip_matrix(p, TerrainPlane{}), InvalidArgument);
  TerrainPlane t;
  t.z_H = 0.0;
  EXPECT_THROW(alip_matrix(default_robot(), t), InvalidArgument);
}

TEST(StepTransition, ZeroIsIdentity) {
  EXPECT_EQ(step_transition(default_robot(), TerrainPlane{}, 0.0), Eigen::Matrix4d::Identity());
}

TEST(StepTransition, MatchesExpmOracleAtStepPeriod) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const Eigen::Matrix4d Phi = step_transition(p, t, 0.3);
  EXPECT_LE((Phi - expm_oracle(alip_matrix(p, t), 0.3)).norm(), 1e-10);
  EXPECT_LE((Phi - oracle::expm_long_double(alip_matrix(p, t), 0.3)).norm(), 1e-10);
}

TEST(StepTransition, UnitDeterminantAndSemigroup) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  for (double dt = 0.0; dt <= 1.0; dt += 0.05) {
    EXPECT_NEAR(step_transition(p, t, dt).determinant(), 1.0, 1e-10) << dt;
  }
  for (double a : {0.0, 0.1, 0.37}) {
    for (double b : {0.05, 0.2, 0.6}) {
      const Eigen::Matrix4d lhs = step_transition(p, t, a) * step_transition(p, t, b);
      const Eigen::Matrix4d rhs = step_transition(p, t, a + b);
      EXPECT_LE((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST(StepTransition, RejectsNegativeTime) {
  EXPECT_THROW(step_transition(default_robot(), TerrainPlane{}, -0.1), InvalidArgument);
}

TEST(ExpmOracle, ZeroAndDiagonal) {
  EXPECT_EQ(expm_oracle(Eigen::Matrix4d::Zero(), 1.0), Eigen::Matrix4d::Identity());
  const Eigen::Vector4d d(0.3, -1.2, 2.5, -4.0);
  const Eigen::Matrix4d E = expm_oracle(d.asDiagonal().toDenseMatrix(), 1.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(E(i, i), std::exp(d[i]), 1e-12 * std::exp(d[i]));
  }
  EXPECT_NEAR(E.norm(), E.diagonal().norm(), 1e-14);
}

TEST(ExpmOracle, FirstOrderApproximation) {
  const Eigen::Matrix4d A = alip_matrix(default_robot(), TerrainPlane{});
  const Eigen::Matrix4d E = expm_oracle(A, 0.01);
  const Eigen::Matrix4d first = oracle::taylor(A, 0.01, 1);
  EXPECT_LT((E - first).lpNorm<Eigen::Infinity>(), 1e-3);
  EXPECT_LT((E - oracle::taylor(A, 0.01, 12)).norm(), 1e-12);
}

TEST(ExpmOracle, RelativeAccuracyOnRandomMatrices) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Matrix4d M;
    for (int i = 0; i < 16; ++i) M(i / 4, i % 4) = u(rng);
    // ||M t|| up to 10 in the induced infinity norm
    const double target = 10.0 * (u(rng) + 1.0) / 2.0;
    const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::Matrix4d E = expm_oracle(M, target / norm);
    const Eigen::Matrix4d R = oracle::expm_long_double(M, target / norm);
    EXPECT_LE((E - R).norm(), 1e-12 * R.norm()) << "trial " << trial;
  }
}

TEST(ExpmOracle, RejectsNonFinite) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(1, 2) = std::nan("");
  EXPECT_THROW(expm_oracle(M, 1.0), InvalidArgument);
  EXPECT_THROW(expm_oracle(Eigen::Matrix4d::Zero(), INFINITY), InvalidArgument);
}

TEST(Impact, Examples) {
  const AlipState x(0.1, -0.15, 2.0, 8.0);
  EXPECT_EQ(apply_impact(x, {0.0, 0.0}).vec(), x.vec());
  const AlipState centred = apply_impact(x, x.position());
  EXPECT_EQ(centred.position(), Eigen::Vector2d::Zero());
  EXPECT_EQ(centred.momentum(), x.momentum());
  const AlipState y = apply_impact(x, {0.4, -0.3});
  EXPECT_NEAR(y.x_c(), -0.3, 1e-15);
  EXPECT_NEAR(y.y_c(), 0.15, 1e-15);
  EXPECT_EQ(y.L_x(), 2.0);
  EXPECT_EQ(y.L_y(), 8.0);
}

TEST(Impact, ConservesMomentum) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const AlipState x(n(rng), n(rng), n(rng), n(rng));
    EXPECT_EQ(apply_impact(x, {n(rng), n(rng)}).momentum(), x.momentum());
  }
}

TEST(PredictToImpact, Examples) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const AlipState x(0.05, -0.1, -3.0, 20.0);
  EXPECT_EQ(predict_to_impact(x, 0.0, p, t).vec(), x.vec());
  const AlipState a = predict_to_impact(AlipState(2.0 * x.vec()), 0.17, p, t);
  const AlipState b = predict_to_impact(x, 0.17, p, t);
  EXPECT_LE((a.vec() - 2.0 * b.vec()).norm(), 1e-12 * a.vec().norm());
  EXPECT_THROW(predict_to_impact(x, -1e-3, p, t), InvalidArgument);
  EXPECT_THROW(predict_to_impact(x, 0.31, p, t), InvalidArgument);
}

TEST(PredictToImpact, OrbitStartFlowsToDesiredImpactState) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const GaitCommand cmd;
  const auto des = desired_impact_state(25.6, cmd, Stance::kLeft, p, t);
  // start-of-step state by the symmetry of the orbit: x_c and L_x mirrored
  const AlipState start(-des.state.x_c(), des.state.y_c(), -des.state.L_x(), des.state.L_y());
  const AlipState end = predict_to_impact(start, p.step_period, p, t);
  EXPECT_LE((end.vec() - des.state.vec()).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(ComDynamics, FlatGroundExactEqualsAlip) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const AlipState s(0.12, -0.07, 3.0, 21.0);
  const Eigen::Vector4d alip = com_dynamics_rhs(s, {}, p, t, ComModel::kAlip);
  EXPECT_EQ(com_dynamics_rhs(s, {}, p, t, ComModel::kExactPre), alip);
  EXPECT_LE((com_dynamics_rhs(s, {}, p, t, ComModel::kExactPost) - alip).norm(), 1e-12);
}

TEST(ComDynamics, PureSagittalMatchesAlipOnSlope) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = 0.2;
  const AlipState s(0.1, 0.0, 0.0, 18.0);
  const Eigen::Vector4d exact = com_dynamics_rhs(s, {}, p, t, ComModel::kExactPre);
  const Eigen::Vector4d alip = com_dynamics_rhs(s, {}, p, t, ComModel::kAlip);
  EXPECT_EQ(exact[1], 0.0);
  EXPECT_NEAR(exact[0], alip[0], 1e-15);
  EXPECT_EQ(exact[3], alip[3]);
}

TEST(ComDynamics, ImplicitSolveMatchesPicardIteration) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = 0.2;
  t.k_y = 0.1;
  const AlipState s(0.1, 0.05, 1.0, 5.0);
  const auto v = oracle::picard_com_velocity(s, {}, p.mass, t);
  ASSERT_TRUE(v.has_value());
  const Eigen::Vector4d rhs = com_dynamics_rhs(s, {}, p, t, ComModel::kExactPre);
  EXPECT_NEAR(rhs[0], (*v)[0], 1e-12);
  EXPECT_NEAR(rhs[1], (*v)[1], 1e-12);
  EXPECT_DOUBLE_EQ(rhs[2], -p.mass * p.gravity * 0.05);
  EXPECT_DOUBLE_EQ(rhs[3], p.mass * p.gravity * 0.1);
}

TEST(ComDynamics, PicardWithCentroidalMomentum) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = -0.15;
  t.k_y = 0.25;
  const CentroidalMomentum Lc{0.4, -0.7, 0.2};
  const AlipState s(-0.08, 0.12, -2.0, 14.0);
  const auto v = oracle::picard_com_velocity(s, Lc, p.mass, t);
  ASSERT_TRUE(v.has_value());
  const Eigen::Vector3d vel = com_velocity(s, Lc, p, t);
  EXPECT_NEAR(vel[0], (*v)[0], 1e-12);
  EXPECT_NEAR(vel[1], (*v)[1], 1e-12);
  EXPECT_NEAR(vel[2], t.k_x * vel[0] + t.k_y * vel[1], 1e-15);
}

TEST(ComDynamics, PreAndPostAgree) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RobotParams p = default_robot();
  for (int i = 0; i < 200; ++i) {
    TerrainPlane t;
    t.k_x = 0.3 * u(rng);
    t.k_y = 0.3 * u(rng);
    const CentroidalMomentum Lc{u(rng), u(rng), u(rng)};
    const AlipState s(0.3 * u(rng), 0.3 * u(rng), 10 * u(rng), 30 * u(rng));
    const Eigen::Vector4d pre = com_dynamics_rhs(s, Lc, p, t, ComModel::kExactPre);
    const Eigen::Vector4d post = com_dynamics_rhs(s, Lc, p, t, ComModel::kExactPost);
    EXPECT_LE((pre - post).lpNorm<Eigen::Infinity>(), 1e-12 * std::max(1.0, pre.norm()));
  }
}

TEST(ComDynamics, SingularityIsReported) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = 1.0;
  // 1 + k_x x / z_H = 0 at x = -z_H
  const AlipState s(-0.8, 0.0, 0.0, 1.0);
  EXPECT_THROW(com_dynamics_rhs(s, {}, p, t, ComModel::kExactPre), SingularityError);
  EXPECT_THROW(com_dynamics_rhs(s, {}, p, t, ComModel::kExactPost), SingularityError);
  EXPECT_NO_THROW(com_dynamics_rhs(s, {}, p, t, ComModel::kAlip));
}

TEST(IntegrateCom, AlipMatchesClosedForm) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const AlipState x0(-0.13, 0.02, 4.0, 26.0);
  const ComTrajectory tr =
      integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kAlip);
  ASSERT_EQ(tr.x.size(), 301u);
  EXPECT_DOUBLE_EQ(tr.t.back(), 0.3);
  const Eigen::Vector4d ref = step_transition(p, t, 0.3) * x0.vec();
  EXPECT_LE((tr.x.back().vec() - ref).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(IntegrateCom, FourthOrderConvergence) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const AlipState x0(-0.13, 0.02, 4.0, 26.0);
  const Eigen::Vector4d ref = step_transition(p, t, 0.3) * x0.vec();
  const auto err = [&](double h) {
    return (integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, h, ComModel::kAlip)
                .x.back()
                .vec() -
            ref)
        .norm();
  };
  const double ratio = err(0.02) / err(0.01);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(IntegrateCom, OrbitalEnergyConserved) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const double m = p.mass;
  const double z = t.z_H;
  const double g = p.gravity;
  const AlipState x0(-0.13, 0.14, -6.0, 26.0);
  const ComTrajectory tr =
      integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kAlip);
  const auto Es = [&](const AlipState& s) {
    return s.L_y() * s.L_y() / (2 * m * m * z * z) - g * s.x_c() * s.x_c() / (2 * z);
  };
  const auto Ef = [&](const AlipState& s) {
    return s.L_x() * s.L_x() / (2 * m * m * z * z) - g * s.y_c() * s.y_c() / (2 * z);
  };
  for (const auto& s : tr.x) {
    EXPECT_NEAR(Es(s), Es(x0), 1e-8);
    EXPECT_NEAR(Ef(s), Ef(x0), 1e-8);
  }
}

TEST(IntegrateCom, ExactPreFlatGroundMatchesAlip) {
  const RobotParams p = default_robot();
  const TerrainPlane t;
  const AlipState x0(-0.13, 0.14, -6.0, 26.0);
  const auto a = integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kAlip);
  const auto e =
      integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kExactPre);
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    EXPECT_LE((a.x[i].vec() - e.x[i].vec()).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(IntegrateCom, SagittalSlopeMatchesAlip) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = 0.2;
  const AlipState x0(-0.12, 0.0, 0.0, 24.0);
  const auto a = integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kAlip);
  const auto e =
      integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kExactPre);
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    EXPECT_NEAR(a.x[i].x_c(), e.x[i].x_c(), 1e-6);
    EXPECT_NEAR(a.x[i].L_y(), e.x[i].L_y(), 1e-6);
    EXPECT_EQ(e.x[i].y_c(), 0.0);
  }
}

// One-step gap between the exact and ALIP flows is controlled by the size of
// the cross term x_c ydot - y_c xdot; shrinking the lateral excursion shrinks
// both together.
TEST(IntegrateCom, GapScalesWithCrossTerm) {
  const RobotParams p = default_robot();
  TerrainPlane t;
  t.k_x = 0.15;
  t.k_y = -0.1;
  constexpr double kC = 1.0;  // s, empirical
  double prev_gap = INFINITY;
  for (double scale : {1.0, 0.1, 0.01, 0.001}) {
    const AlipState x0(-0.12, 0.1 * scale, -4.0 * scale, 24.0);
    const auto a = integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kAlip);
    const auto e =
        integrate_com(x0, zero_centroidal_profile(), p, t, 0.3, 1e-3, ComModel::kExactPre);
    double cross = 0.0;
    for (const auto& s : e.x) {
      const Eigen::Vector3d v = com_velocity(s, {}, p, t);
      cross = std::max(cross, std::abs(s.x_c() * v[1] - s.y_c() * v[0]));
    }
    const Eigen::Vector4d d = e.x.back().vec() - a.x.back().vec();
    const double gap = std::max(d.head<2>().lpNorm<Eigen::Infinity>(),
                                d.tail<2>().lpNorm<Eigen::Infinity>() / (p.mass * t.z_H));
    EXPECT_LE(gap, kC * cross) << "scale " << scale;
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-4);
}

TEST(IntegrateCom, RejectsBadStep) {
  const auto Lc = zero_centroidal_profile();
  EXPECT_THROW(integrate_com({}, Lc, default_robot(), {}, 0.3, 0.0, ComModel::kAlip),
               InvalidArgument);
  EXPECT_THROW(integrate_com({}, Lc, default_robot(), {}, 0.3, 0.4, ComModel::kAlip),
               InvalidArgument);
  EXPECT_THROW(integrate_com({}, Lc, default_robot(), {}, 0.3, 0.007, ComModel::kAlip),
               InvalidArgument);
}

TEST(IntegrateCom, PropagatesSingularity) {
  TerrainPlane t;
  t.k_x = 1.0;
  const AlipState x0(-0.79, 0.0, 0.0, -40.0);
  EXPECT_THROW(integrate_com(x0, zero_centroidal_profile(), default_robot(), t, 0.3, 1e-3,
                             ComModel::kExactPre),
               SingularityError);
}

}  // namespace
}  // namespace alipmpc
