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

#include "alipmpc/alip_model.hpp"

#include <cmath>
#include <string>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

constexpr double kSingularDet = 1e-12;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be finite");
  }
}

}  // namespace

void RobotParams::validate() const {
  require_finite(mass, "mass");
  require_finite(gravity, "gravity");
  require_finite(step_period, "step_period");
  require_finite(step_width, "step_width");
  if (mass <= 0.0) throw InvalidArgument("mass must be positive");
  if (gravity <= 0.0) throw InvalidArgument("gravity must be positive");
  if (step_period <= 0.0) throw InvalidArgument("step_period must be positive");
  if (step_width < 0.0) throw InvalidArgument("step_width must be non-negative");
}

void TerrainPlane::validate() const {
  require_finite(k_x, "k_x");
  require_finite(k_y, "k_y");
  require_finite(mu, "mu");
  require_finite(z_H, "z_H");
  if (z_H <= 0.0) throw InvalidArgument("z_H must be positive");
  if (mu < 0.0) throw InvalidArgument("mu must be non-negative");
}

Eigen::Matrix4d alip_matrix(const RobotParams& params,
                            const TerrainPlane& terrain) {
  params.validate();
  terrain.validate();
  const double mz = params.mass * terrain.z_H;
  const double mg = params.mass * params.gravity;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  A(0, 3) = 1.0 / mz;
  A(1, 2) = -1.0 / mz;
  A(2, 1) = -mg;
  A(3, 0) = mg;
  return A;
}

Eigen::Matrix4d step_transition(const RobotParams& params,
                                const TerrainPlane& terrain, double dt) {
  params.validate();
  terrain.validate();
  if (!std::isfinite(dt) || dt < 0.0) {
    throw InvalidArgument("step_transition: dt must be finite and >= 0");
  }
  const double ell = std::sqrt(params.gravity / terrain.z_H);
  const double mzl = params.mass * terrain.z_H * ell;
  const double c = std::cosh(ell * dt);
  const double s = std::sinh(ell * dt);

  Eigen::Matrix4d Phi = Eigen::Matrix4d::Zero();
  Phi.diagonal().setConstant(c);
  // sagittal block (x_c, L_y)
  Phi(0, 3) = s / mzl;
  Phi(3, 0) = mzl * s;
  // lateral block (y_c, L_x)
  Phi(1, 2) = -s / mzl;
  Phi(2, 1) = -mzl * s;
  return Phi;
}

Eigen::Matrix4d expm_oracle(const Eigen::Matrix4d& M, double t) {
  if (!M.allFinite() || !std::isfinite(t)) {
    throw InvalidArgument("expm_oracle: non-finite input");
  }
  Eigen::Matrix4d X = M * t;

  // Power-of-two diagonal balancing, D^-1 X D. Exact in floating point and
  // undone after exponentiation: exp(D^-1 X D) = D^-1 exp(X) D.
  Eigen::Vector4d d = Eigen::Vector4d::Ones();
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < 4; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        col += std::abs(X(j, i));
        row += std::abs(X(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      const double total = col + row;
      while (col < row / 2.0) {
        col *= 2.0;
        row /= 2.0;
        f *= 2.0;
      }
      while (col >= row * 2.0) {
        col /= 2.0;
        row *= 2.0;
        f /= 2.0;
      }
      if (col + row < 0.95 * total) {
        changed = true;
        d[i] *= f;
        X.row(i) /= f;
        X.col(i) *= f;
      }
    }
  }

  const double norm = X.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Eigen::Matrix4d Y = X / std::ldexp(1.0, squarings);

  // Taylor series; ||Y|| <= 0.5 so 20 terms are far below machine precision.
  Eigen::Matrix4d E = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * Y / static_cast<double>(k);
    E += term;
  }
  for (int k = 0; k < squarings; ++k) E = E * E;

  // Undo balancing: exp(X_original) = D exp(X_balanced) D^-1.
  return d.asDiagonal() * E * d.cwiseInverse().asDiagonal();
}

Eigen::Matrix<double, 4, 2> impact_matrix() {
  Eigen::Matrix<double, 4, 2> B = Eigen::Matrix<double, 4, 2>::Zero();
  B(0, 0) = -1.0;
  B(1, 1) = -1.0;
  return B;
}

AlipState apply_impact(const AlipState& x_minus, const Eigen::Vector2d& u_fp) {
  return AlipState(x_minus.vec() + impact_matrix() * u_fp);
}

AlipState predict_to_impact(const AlipState& x_t, double time_remaining,
                            const RobotParams& params,
                            const TerrainPlane& terrain) {
  if (!std::isfinite(time_remaining) || time_remaining < 0.0 ||
      time_remaining > params.step_period) {
    throw InvalidArgument("predict_to_impact: time_remaining must lie in [0, T_s]");
  }
  return AlipState(step_transition(params, terrain, time_remaining) * x_t.vec());
}

Eigen::Vector3d com_velocity(const ComState& state,
                             const CentroidalMomentum& Lc,
                             const RobotParams& params,
                             const TerrainPlane& terrain) {
  const double zH = terrain.z_H;
  const double m = params.mass;
  const double x = state.x_c();
  const double y = state.y_c();
  const double kx = terrain.k_x;
  const double ky = terrain.k_y;

  // xdot, ydot appear on both sides through the cross term
  // (x*ydot - y*xdot); collect them into M * [xdot; ydot] = rhs.
  const double m11 = 1.0 + ky * y / zH;
  const double m12 = -ky * x / zH;
  const double m21 = -kx * y / zH;
  const double m22 = 1.0 + kx * x / zH;
  const double det = m11 * m22 - m12 * m21;  // = 1 + (kx x + ky y)/zH
  if (!(det >= kSingularDet)) {
    throw SingularityError("exact CoM dynamics singular: z_c/z_H = " +
                           std::to_string(det));
  }
  const double a = (state.L_y() - Lc.y) / (m * zH);
  const double b = (-state.L_x() + Lc.x) / (m * zH);
  const double xdot = (a * m22 - m12 * b) / det;
  const double ydot = (m11 * b - m21 * a) / det;
  return {xdot, ydot, kx * xdot + ky * ydot};
}

Eigen::Vector4d com_dynamics_rhs(const ComState& state,
                                 const CentroidalMomentum& Lc,
                                 const RobotParams& params,
                                 const TerrainPlane& terrain, ComModel model) {
  const double m = params.mass;
  const double g = params.gravity;
  const double zH = terrain.z_H;
  Eigen::Vector4d dx;
  dx[2] = -m * g * state.y_c();
  dx[3] = m * g * state.x_c();

  switch (model) {
    case ComModel::kAlip:
      dx[0] = state.L_y() / (m * zH);
      dx[1] = -state.L_x() / (m * zH);
      break;
    case ComModel::kExactPre: {
      const Eigen::Vector3d v = com_velocity(state, Lc, params, terrain);
      dx[0] = v[0];
      dx[1] = v[1];
      break;
    }
    case ComModel::kExactPost: {
      // Recover pdot from L = L_c + p x m pdot with z_c on the plane, then
      // form L_z and evaluate the explicit-L_z form.
      const double x = state.x_c();
      const double y = state.y_c();
      const double zc = terrain.k_x * x + terrain.k_y * y + zH;
      if (!(zc / zH >= kSingularDet)) {
        throw SingularityError("exact CoM dynamics singular: z_c = 0");
      }
      Eigen::Matrix2d M;
      M << zc - terrain.k_x * x, -terrain.k_y * x,
          -terrain.k_x * y, zc - terrain.k_y * y;
      const Eigen::Vector2d rhs((state.L_y() - Lc.y) / m,
                                (Lc.x - state.L_x()) / m);
      const Eigen::Vector2d pdot = M.partialPivLu().solve(rhs);
      const double Lz = Lc.z + m * (x * pdot[1] - y * pdot[0]);
      dx[0] = state.L_y() / (m * zH) + terrain.k_y / (m * zH) * (Lz - Lc.z) -
              Lc.y / (m * zH);
      dx[1] = -state.L_x() / (m * zH) - terrain.k_x / (m * zH) * (Lz - Lc.z) +
              Lc.x / (m * zH);
      break;
    }
  }
  return dx;
}

ComState rk4_step(const ComState& x, double t, double h,
                  const CentroidalProfile& Lc, const RobotParams& params,
                  const TerrainPlane& terrain, ComModel model) {
  const auto f = [&](double tt, const Eigen::Vector4d& v) {
    return com_dynamics_rhs(ComState(v), Lc(tt), params, terrain, model);
  };
  const Eigen::Vector4d& v = x.vec();
  const Eigen::Vector4d k1 = f(t, v);
  const Eigen::Vector4d k2 = f(t + 0.5 * h, v + 0.5 * h * k1);
  const Eigen::Vector4d k3 = f(t + 0.5 * h, v + 0.5 * h * k2);
  const Eigen::Vector4d k4 = f(t + h, v + h * k3);
  return ComState(v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

ComTrajectory integrate_com(const ComState& x0, const CentroidalProfile& Lc,
                            const RobotParams& params,
                            const TerrainPlane& terrain, double T, double h,
                            ComModel model) {
  params.validate();
  terrain.validate();
  if (!(T > 0.0) || !(h > 0.0) || h > T) {
    throw InvalidArgument("integrate_com: need T > 0 and 0 < h <= T");
  }
  const long steps = std::lround(T / h);
  if (std::abs(static_cast<double>(steps) * h - T) > 1e-9 * T) {
    throw InvalidArgument("integrate_com: T must be a multiple of h");
  }

  ComTrajectory traj;
  traj.t.reserve(steps + 1);
  traj.x.reserve(steps + 1);
  traj.t.push_back(0.0);
  traj.x.push_back(x0);
  ComState x = x0;
  for (long k = 0; k < steps; ++k) {
    x = rk4_step(x, static_cast<double>(k) * h, h, Lc, params, terrain, model);
    traj.t.push_back(static_cast<double>(k + 1) * h);
    traj.x.push_back(x);
  }
  return traj;
}

CentroidalProfile zero_centroidal_profile() {
  return [](double) { return CentroidalMomentum{}; };
}

}  // namespace alipmpc
