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

#include "alipmpc/reference.hpp"

#include <cmath>

#include "alipmpc/errors.hpp"

namespace alipmpc {

void GaitCommand::validate() const {
  if (!std::isfinite(vx_des) || !std::isfinite(lx_offset) ||
      !std::isfinite(delta_psi) || !std::isfinite(step_width)) {
    throw InvalidArgument("gait command must be finite");
  }
  if (step_width < 0.0) throw InvalidArgument("step width must be non-negative");
}

double natural_frequency(const RobotParams& params, const TerrainPlane& terrain) {
  if (!(params.gravity > 0.0) || !(terrain.z_H > 0.0)) {
    throw InvalidArgument("natural_frequency: g and z_H must be positive");
  }
  return std::sqrt(params.gravity / terrain.z_H);
}

double velocity_to_momentum(double vx_des, const RobotParams& params,
                            const TerrainPlane& terrain) {
  return params.mass * terrain.z_H * vx_des;
}

double lateral_velocity_to_offset(double vy_des, const RobotParams& params,
                                  const TerrainPlane& terrain) {
  return -params.mass * terrain.z_H * vy_des;
}

DesiredImpactState desired_impact_state(double Ly_des, const GaitCommand& cmd,
                                        Stance stance,
                                        const RobotParams& params,
                                        const TerrainPlane& terrain) {
  params.validate();
  terrain.validate();
  cmd.validate();
  const double ell = natural_frequency(params, terrain);
  const double mzl = params.mass * terrain.z_H * ell;
  const double th = std::tanh(0.5 * ell * params.step_period);
  const double sigma = sign(stance);
  const double W = cmd.step_width;

  const double x_c = th * Ly_des / mzl;
  const double y_c = -0.5 * sigma * W;
  const double L_x = 0.5 * sigma * mzl * W * th + cmd.lx_offset;
  return {AlipState(x_c, y_c, L_x, Ly_des), stance};
}

AlipState orbit_step_start(const AlipState& target, const RobotParams& params,
                           const TerrainPlane& terrain) {
  const Eigen::Matrix4d Phi = step_transition(params, terrain, params.step_period);
  return AlipState(Phi.partialPivLu().solve(target.vec()));
}

Eigen::Vector2d periodic_foot_placement(double Ly_des, const GaitCommand& cmd,
                                        Stance stance,
                                        const RobotParams& params,
                                        const TerrainPlane& terrain) {
  const auto end = desired_impact_state(Ly_des, cmd, stance, params, terrain);
  const auto next =
      desired_impact_state(Ly_des, cmd, flipped(stance), params, terrain);
  const AlipState start = orbit_step_start(next.state, params, terrain);
  // x+ = x- - u on the position components.
  return end.state.position() - start.position();
}

Stance stance_schedule(int step_index, Stance initial) {
  return (step_index % 2 == 0) ? initial : flipped(initial);
}

}  // namespace alipmpc
