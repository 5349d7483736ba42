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

/// Output values at the start of a step, in output order.
struct OutputInit {
  double torso_pitch = 0.0;
  double torso_roll = 0.0;
  double stance_hip_yaw = 0.0;
  double swing_hip_yaw = 0.0;
  double com_height = 0.0;
  double swing_x = 0.0;  // swing toe relative to stance toe
  double swing_y = 0.0;
  double swing_z = 0.0;
  double swing_toe_pitch = 0.0;
};

/// Step clearance: the swing foot passes height z_cl at phase s_cl.
struct Clearance {
  double s_cl = 0.5;
  double z_cl = 0.15;  // m
};

struct SwingTargets {
  Eigen::Vector2d foot_xy = Eigen::Vector2d::Zero();  // MPC foot placement
  double foot_z = 0.0;                                // m
  double delta_psi = 0.0;                             // rad
  double z_H = 0.8;
  double k_x = 0.0;
  Clearance clearance;
};

using OutputVector = Eigen::Matrix<double, 9, 1>;

struct Phase {
  double s = 0.0;
  bool clamped = false;
};

/// s = t / T_s, clamped into [0, 1] (clamped flag set when t was outside).
Phase phase(double t_since_impact, double step_period);

/// Coefficients (b1, b2, b3) of z(s) = b1 s^2 + b2 s + b3 through
/// (0, z_init), (1, z_final) and (s_cl, z_cl). Rejects s_cl outside (0, 1).
Eigen::Vector3d parabola_coeffs(double z_init, double z_final, double s_cl,
                                double z_cl);

/// Reference outputs h_d(s) for s in [0, 1].
OutputVector reference_outputs(double s, const OutputInit& init,
                               const SwingTargets& targets);

/// Swing-toe position relative to the stance toe along the reference. Valid
/// past s = 1: x/y hold at the target and z continues along the parabola,
/// which is how a late touchdown on lower-than-planned ground is modelled.
Eigen::Vector3d swing_foot_position(double s, const OutputInit& init,
                                    const SwingTargets& targets);

/// Height of the CoM above its projection onto the inclined ground:
/// p_z - k_x p_x - k_y p_y, for p the stance-toe-to-CoM vector.
double com_height_output(const Eigen::Vector3d& p_stance_to_com,
                         const TerrainPlane& terrain);

/// Planned touchdown height for a placement u on the given plane.
double swing_target_height(const Eigen::Vector2d& u, const TerrainPlane& terrain);

}  // namespace alipmpc
