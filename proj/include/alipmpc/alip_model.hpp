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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace alipmpc {

/// Physical parameters of the walker.
struct RobotParams {
  double mass = 32.0;          // kg
  double gravity = 9.81;       // m/s^2
  double step_period = 0.3;    // s
  double step_width = 0.3;     // m, nominal lateral foot spacing

  /// Throws InvalidArgument unless mass, gravity, step_period > 0 and
  /// step_width >= 0.
  void validate() const;
};

/// Locally planar terrain under the stance foot. The CoM is constrained to
/// z_c = k_x*x_c + k_y*y_c + z_H relative to the contact point.
struct TerrainPlane {
  double k_x = 0.0;   // tan of the sagittal slope angle
  double k_y = 0.0;   // tan of the lateral slope angle
  double mu = 0.6;    // Coulomb friction coefficient
  double z_H = 0.8;   // m

  void validate() const;
  /// Plane height at horizontal offset (x, y) from the contact point.
  double height_at(double x, double y) const { return k_x * x + k_y * y; }
};

/// Which foot is on the ground. The underlying value is the sign used in the
/// periodic-orbit formulas (+1 left, -1 right).
enum class Stance : int { kLeft = 1, kRight = -1 };

inline double sign(Stance s) { return static_cast<double>(static_cast<int>(s)); }
inline Stance flipped(Stance s) {
  return s == Stance::kLeft ? Stance::kRight : Stance::kLeft;
}

/// Reduced-order state: CoM offset from the stance contact and angular
/// momentum about the contact, ordered (x_c, y_c, L_x, L_y).
class AlipState {
 public:
  AlipState() : v_(Eigen::Vector4d::Zero()) {}
  explicit AlipState(const Eigen::Vector4d& v) : v_(v) {}
  AlipState(double x_c, double y_c, double L_x, double L_y)
      : v_(x_c, y_c, L_x, L_y) {}

  double x_c() const { return v_[0]; }
  double y_c() const { return v_[1]; }
  double L_x() const { return v_[2]; }
  double L_y() const { return v_[3]; }

  const Eigen::Vector4d& vec() const { return v_; }
  Eigen::Vector2d position() const { return v_.head<2>(); }
  Eigen::Vector2d momentum() const { return v_.tail<2>(); }

  bool is_finite() const { return v_.allFinite(); }

 private:
  Eigen::Vector4d v_;
};

/// The exact CoM dynamics use the same four coordinates; z_c is implied by
/// the terrain plane.
using ComState = AlipState;

/// Angular momentum about the CoM (exogenous input for the exact model).
struct CentroidalMomentum {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using CentroidalProfile = std::function<CentroidalMomentum(double)>;

/// Right-hand side variants for the CoM dynamics.
enum class ComModel {
  kExactPre,   // height constraint substituted, implicit in (xdot, ydot)
  kExactPost,  // same, written with L_z made explicit
  kAlip,       // cross term and L_c dropped: the linear 3D-ALIP
};

/// Continuous-time ALIP system matrix. Two decoupled 2x2 blocks over
/// (x_c, L_y) and (y_c, L_x).
Eigen::Matrix4d alip_matrix(const RobotParams& params,
                            const TerrainPlane& terrain);

/// exp(A*dt) in closed form via cosh/sinh of the natural frequency.
Eigen::Matrix4d step_transition(const RobotParams& params,
                                const TerrainPlane& terrain, double dt);

/// General 4x4 matrix exponential exp(M*t) by scaling and squaring with a
/// truncated Taylor series. Kept independent of step_transition so the two
/// can check each other.
Eigen::Matrix4d expm_oracle(const Eigen::Matrix4d& M, double t);

/// Maps a foot placement (u_x, u_y) into the state jump at impact.
Eigen::Matrix<double, 4, 2> impact_matrix();

/// Coordinate change to the new stance foot; momenta are conserved.
AlipState apply_impact(const AlipState& x_minus, const Eigen::Vector2d& u_fp);

/// Flows the ALIP model for the time left in the current step.
AlipState predict_to_impact(const AlipState& x_t, double time_remaining,
                            const RobotParams& params,
                            const TerrainPlane& terrain);

/// Time derivative of (x_c, y_c, L_x, L_y) for the selected model.
/// Throws SingularityError when the exact models reach z_c/z_H <= 0 (CoM
/// on or below the ground plane through the contact).
Eigen::Vector4d com_dynamics_rhs(const ComState& state,
                                 const CentroidalMomentum& Lc,
                                 const RobotParams& params,
                                 const TerrainPlane& terrain, ComModel model);

/// CoM velocity (xdot, ydot, zdot) implied by the exact dynamics. Used for
/// the L_z reconstruction and for diagnostics.
Eigen::Vector3d com_velocity(const ComState& state,
                             const CentroidalMomentum& Lc,
                             const RobotParams& params,
                             const TerrainPlane& terrain);

/// One classical RK4 step with the centroidal profile evaluated at t.
ComState rk4_step(const ComState& x, double t, double h,
                  const CentroidalProfile& Lc, const RobotParams& params,
                  const TerrainPlane& terrain, ComModel model);

struct ComTrajectory {
  std::vector<double> t;
  std::vector<ComState> x;
};

/// Fixed-step RK4 integration over [0, T]; samples at 0, h, 2h, ..., T.
/// T must be an integer multiple of h to within 1e-9 relative.
ComTrajectory integrate_com(const ComState& x0, const CentroidalProfile& Lc,
                            const RobotParams& params,
                            const TerrainPlane& terrain, double T, double h,
                            ComModel model);

/// Profile that is identically zero.
CentroidalProfile zero_centroidal_profile();

}  // namespace alipmpc
