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

#include "alipmpc/errors.hpp"
#include "alipmpc/reference.hpp"
#include "oracles.hpp"

namespace alipmpc {
namespace {

TEST(NaturalFrequency, Examples) {
  const RobotParams p;
  TerrainPlane t;
  EXPECT_NEAR(natural_frequency(p, t), 3.5017852589786, 1e-12);
  RobotParams unit;
  unit.gravity = 0.8;
  EXPECT_DOUBLE_EQ(natural_frequency(unit, t), 1.0);
  TerrainPlane tall = t;
  tall.z_H = 4.0 * t.z_H;
  EXPECT_NEAR(natural_frequency(p, tall), 0.5 * natural_frequency(p, t), 1e-15);
  t.z_H = 0.0;
  EXPECT_THROW(natural_frequency(p, t), InvalidArgument);
}

TEST(VelocityToMomentum, Examples) {
  const RobotParams p;
  const TerrainPlane t;
  EXPECT_EQ(velocity_to_momentum(0.0, p, t), 0.0);
  EXPECT_DOUBLE_EQ(velocity_to_momentum(1.0, p, t), 25.6);
  EXPECT_DOUBLE_EQ(velocity_to_momentum(1.5, p, t), 38.4);
  EXPECT_DOUBLE_EQ(lateral_velocity_to_offset(0.5, p, t), -12.8);
}

TEST(DesiredImpactState, ZeroCommand) {
  GaitCommand cmd;
  cmd.step_width = 0.0;
  const auto d = desired_impact_state(0.0, cmd, Stance::kLeft, RobotParams{}, TerrainPlane{});
  EXPECT_EQ(d.state.vec(), Eigen::Vector4d::Zero());
}

TEST(DesiredImpactState, StanceSymmetry) {
  const GaitCommand cmd;
  const auto l = desired_impact_state(25.6, cmd, Stance::kLeft, RobotParams{}, TerrainPlane{});
  const auto r = desired_impact_state(25.6, cmd, Stance::kRight, RobotParams{}, TerrainPlane{});
  EXPECT_EQ(l.state.x_c(), r.state.x_c());
  EXPECT_EQ(l.state.L_y(), r.state.L_y());
  EXPECT_EQ(l.state.y_c(), -r.state.y_c());
  EXPECT_EQ(l.state.L_x(), -r.state.L_x());
  EXPECT_EQ(l.stance, Stance::kLeft);
}

TEST(DesiredImpactState, WorkedNumbers) {
  const GaitCommand cmd;
  const auto d = desired_impact_state(25.6, cmd, Stance::kLeft, RobotParams{}, TerrainPlane{});
  EXPECT_NEAR(d.state.x_c(), 0.13757424497641, 1e-12);
  EXPECT_DOUBLE_EQ(d.state.y_c(), -0.15);
  EXPECT_NEAR(d.state.L_x(), 6.478096047449, 1e-9);
  EXPECT_DOUBLE_EQ(d.state.L_y(), 25.6);
}

TEST(DesiredImpactState, OddInMomentumAndOffsetShift) {
  GaitCommand cmd;
  const RobotParams p;
  const TerrainPlane t;
  const auto a = desired_impact_state(17.0, cmd, Stance::kRight, p, t);
  const auto b = desired_impact_state(-17.0, cmd, Stance::kRight, p, t);
  EXPECT_EQ(a.state.x_c(), -b.state.x_c());
  EXPECT_EQ(a.state.y_c(), b.state.y_c());
  cmd.lx_offset = 3.0;
  const auto c = desired_impact_state(17.0, cmd, Stance::kRight, p, t);
  EXPECT_DOUBLE_EQ(c.state.L_x() - a.state.L_x(), 3.0);
}

// Two-step roll-out with the symmetric-orbit placements returns to the start.
TEST(PeriodicOrbit, TwoStepRolloutReturnsToStart) {
  const RobotParams p;
  const TerrainPlane t;
  const GaitCommand cmd;
  for (Stance s : {Stance::kLeft, Stance::kRight}) {
    const auto d = desired_impact_state(25.6, cmd, s, p, t);
    const double x_T = d.state.x_c();
    const std::vector<Eigen::Vector2d> u = {oracle::orbit_placement(x_T, s, 0.3),
                                            oracle::orbit_placement(x_T, flipped(s), 0.3)};
    const auto states = oracle::rollout(d.state, u, p, t);
    const auto mid = desired_impact_state(25.6, cmd, flipped(s), p, t);
    EXPECT_LE((states[0].vec() - mid.state.vec()).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((states[1].vec() - d.state.vec()).lpNorm<Eigen::Infinity>(), 1e-9);
    // zero average lateral motion over the two steps
    EXPECT_NEAR(u[0][1] + u[1][1], 0.0, 1e-9);
  }
}

TEST(PeriodicOrbit, LibraryPlacementMatchesSymmetricOrbit) {
  const RobotParams p;
  const TerrainPlane t;
  const GaitCommand cmd;
  for (double Ly : {0.0, 12.0, 25.6, 38.4, -10.0}) {
    for (Stance s : {Stance::kLeft, Stance::kRight}) {
      const double x_T = desired_impact_state(Ly, cmd, s, p, t).state.x_c();
      const Eigen::Vector2d u = periodic_foot_placement(Ly, cmd, s, p, t);
      EXPECT_LE((u - oracle::orbit_placement(x_T, s, 0.3)).norm(), 1e-9) << Ly;
    }
  }
  EXPECT_NEAR(periodic_foot_placement(25.6, cmd, Stance::kLeft, p, t)[0], 0.2751484899528, 1e-9);
}

TEST(PeriodicOrbit, StepStartFlowsToTarget) {
  const RobotParams p;
  const TerrainPlane t;
  const auto d = desired_impact_state(25.6, GaitCommand{}, Stance::kLeft, p, t);
  const AlipState start = orbit_step_start(d.state, p, t);
  EXPECT_LE((predict_to_impact(start, p.step_period, p, t).vec() - d.state.vec()).norm(), 1e-9);
  EXPECT_NEAR(start.x_c(), -d.state.x_c(), 1e-9);
}

TEST(StanceSchedule, Alternates) {
  EXPECT_EQ(stance_schedule(0, Stance::kLeft), Stance::kLeft);
  EXPECT_EQ(stance_schedule(1, Stance::kLeft), Stance::kRight);
  EXPECT_EQ(stance_schedule(2, Stance::kLeft), Stance::kLeft);
  EXPECT_EQ(stance_schedule(7, Stance::kRight), Stance::kLeft);
}

TEST(GaitCommand, Validation) {
  GaitCommand cmd;
  cmd.step_width = -0.1;
  EXPECT_THROW(cmd.validate(), InvalidArgument);
  cmd = GaitCommand{};
  cmd.vx_des = NAN;
  EXPECT_THROW(cmd.validate(), InvalidArgument);
}

}  // namespace
}  // namespace alipmpc
