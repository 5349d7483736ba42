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

#include "alipmpc/swing.hpp"

#include <cmath>
#include <numbers>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

// Sinusoidal blend weight toward the target: 0 at s=0, 1 at s=1, zero slope
// at both ends.
double blend(double s) { return 0.5 * (1.0 - std::cos(std::numbers::pi * s)); }

}  // namespace

Phase phase(double t_since_impact, double step_period) {
  if (!(step_period > 0.0)) throw InvalidArgument("phase: step period must be positive");
  Phase p{t_since_impact / step_period, false};
  if (p.s < 0.0) {
    p = {0.0, true};
  } else if (p.s > 1.0) {
    p = {1.0, true};
  }
  return p;
}

Eigen::Vector3d parabola_coeffs(double z_init, double z_final, double s_cl,
                                double z_cl) {
  if (!(s_cl > 0.0 && s_cl < 1.0)) {
    throw InvalidArgument("parabola_coeffs: clearance phase must lie in (0, 1)");
  }
  const double b1 =
      (z_cl - z_init - s_cl * (z_final - z_init)) / (s_cl * (s_cl - 1.0));
  const double b2 = (z_final - z_init) - b1;
  return {b1, b2, z_init};
}

OutputVector reference_outputs(double s, const OutputInit& init,
                               const SwingTargets& targets) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InvalidArgument("reference_outputs: phase must lie in [0, 1]");
  }
  const Eigen::Vector3d foot = swing_foot_position(s, init, targets);
  OutputVector h;
  h << 0.0,
       0.0,
       (1.0 - s) * init.stance_hip_yaw - s * 0.5 * targets.delta_psi,
       (1.0 - s) * init.swing_hip_yaw + s * 0.5 * targets.delta_psi,
       targets.z_H,
       foot[0],
       foot[1],
       foot[2],
       targets.k_x;
  return h;
}

Eigen::Vector3d swing_foot_position(double s, const OutputInit& init,
                                    const SwingTargets& targets) {
  const double w = s >= 1.0 ? 1.0 : blend(s);
  const Eigen::Vector3d beta = parabola_coeffs(
      init.swing_z, targets.foot_z, targets.clearance.s_cl, targets.clearance.z_cl);
  return {(1.0 - w) * init.swing_x + w * targets.foot_xy[0],
          (1.0 - w) * init.swing_y + w * targets.foot_xy[1],
          beta[0] * s * s + beta[1] * s + beta[2]};
}

double com_height_output(const Eigen::Vector3d& p, const TerrainPlane& terrain) {
  return p.z() - terrain.k_x * p.x() - terrain.k_y * p.y();
}

double swing_target_height(const Eigen::Vector2d& u, const TerrainPlane& terrain) {
  return terrain.height_at(u[0], u[1]);
}

}  // namespace alipmpc
