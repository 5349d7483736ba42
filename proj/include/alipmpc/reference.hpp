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

/// Operator command for one step.
struct GaitCommand {
  double vx_des = 0.0;     // m/s
  double lx_offset = 0.0;  // kg m^2/s, shifts the lateral momentum target
  double delta_psi = 0.0;  // rad, desired turn per step (swing references only)
  double step_width = 0.3; // m

  void validate() const;
};

/// Desired pre-impact state at the end of a step taken on `stance`.
struct DesiredImpactState {
  AlipState state;
  Stance stance = Stance::kLeft;
};

/// ell = sqrt(g / z_H).
double natural_frequency(const RobotParams& params, const TerrainPlane& terrain);

/// L_y = m * z_H * v for CoM motion parallel to the ground.
double velocity_to_momentum(double vx_des, const RobotParams& params,
                            const TerrainPlane& terrain);

/// First-order inverse of the lateral ALIP row: the L_x offset that
/// commands an average lateral CoM velocity vy_des.
double lateral_velocity_to_offset(double vy_des, const RobotParams& params,
                                  const TerrainPlane& terrain);

/// End-of-step state of the two-step periodic orbit for the given stance.
DesiredImpactState desired_impact_state(double Ly_des, const GaitCommand& cmd,
                                        Stance stance,
                                        const RobotParams& params,
                                        const TerrainPlane& terrain);

/// Post-impact (start-of-step) state whose flow over one step period ends at
/// `target`.
AlipState orbit_step_start(const AlipState& target, const RobotParams& params,
                           const TerrainPlane& terrain);

/// Foot placement that carries the orbit from the end of a `stance` step
/// to the start of the next step (stance flipped). Exact only for
/// lx_offset = 0.
Eigen::Vector2d periodic_foot_placement(double Ly_des, const GaitCommand& cmd,
                                        Stance stance,
                                        const RobotParams& params,
                                        const TerrainPlane& terrain);

/// sigma(k) = sigma(0) * (-1)^k.
Stance stance_schedule(int step_index, Stance initial);

}  // namespace alipmpc
