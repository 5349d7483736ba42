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

#include "alipmpc/mpc.hpp"

#include <algorithm>
#include <cmath>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

bool is_symmetric_psd(const Eigen::Matrix4d& M) {
  if (!M.allFinite() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(M);
  return eig.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, M.norm());
}

RowKey key_of(const InequalityRow& row) {
  return {static_cast<int>(row.tag), row.sample, row.side};
}

bool is_input(int tag) {
  return tag == static_cast<int>(ConstraintTag::kInputX) ||
         tag == static_cast<int>(ConstraintTag::kInputY);
}

}  // namespace

Eigen::Matrix4d default_step_weight() {
  return Eigen::Vector4d(1.0, 1.0, 0.05, 0.05).asDiagonal();
}

void MpcConfig::validate() const {
  if (horizon_steps < 1) throw InvalidArgument("horizon_steps must be >= 1");
  if (samples_per_step < 1) throw InvalidArgument("samples_per_step must be >= 1");
  if (!is_symmetric_psd(Q_step)) throw InvalidArgument("Q_step must be symmetric PSD");
  if (Q_f && !is_symmetric_psd(*Q_f)) throw InvalidArgument("Q_f must be symmetric PSD");
  if (!(regularization > 0.0) || !std::isfinite(regularization)) {
    throw InvalidArgument("regularization must be a positive number");
  }
  workspace.validate();
}

double CondensedProblem::cost(const Eigen::VectorXd& U) const {
  return U.dot(qp.hessian * U) + 2.0 * qp.gradient.dot(U) + cost_offset;
}

CondensedProblem condense(const AlipState& x0,
                          std::span<const DesiredImpactState> x_des,
                          const MpcConfig& config, const RobotParams& params,
                          const TerrainPlane& terrain,
                          const Eigen::Matrix4d& Q_f,
                          std::span<const TerrainPlane> sample_terrain) {
  config.validate();
  const int Ns = config.horizon_steps;
  const int N = config.samples_per_step;
  const int total = Ns * N;
  const int nu = 2 * Ns;
  if (static_cast<int>(x_des.size()) != Ns) {
    throw InvalidArgument("condense: need one desired state per horizon step");
  }
  for (std::size_t j = 1; j < x_des.size(); ++j) {
    if (x_des[j].stance == x_des[j - 1].stance) {
      throw InvalidArgument("condense: desired stances must alternate");
    }
  }
  if (!sample_terrain.empty() && static_cast<int>(sample_terrain.size()) != total + 1) {
    throw InvalidArgument("condense: sample terrain must cover samples 0..N_dt*N_s");
  }
  if (!x0.is_finite()) throw InvalidArgument("condense: non-finite initial state");

  const Eigen::Matrix4d A_dt =
      step_transition(params, terrain, params.step_period / N);
  const Eigen::Matrix<double, 4, 2> B = impact_matrix();

  CondensedProblem out;
  HorizonGeometry& geom = out.geometry;
  geom.samples_per_step = N;
  geom.num_steps = Ns;
  geom.offset.resize(static_cast<std::size_t>(total + 1));
  geom.gain.resize(static_cast<std::size_t>(total + 1));
  geom.offset[0] = x0.vec();
  geom.gain[0] = Eigen::MatrixXd::Zero(4, nu);
  for (int i = 0; i < total; ++i) {
    Eigen::MatrixXd g = geom.gain[static_cast<std::size_t>(i)];
    if (i % N == 0) g.middleCols(2 * (i / N), 2) += B;
    geom.gain[static_cast<std::size_t>(i + 1)] = A_dt * g;
    geom.offset[static_cast<std::size_t>(i + 1)] =
        A_dt * geom.offset[static_cast<std::size_t>(i)];
  }

  Eigen::MatrixXd H = config.regularization * Eigen::MatrixXd::Identity(nu, nu);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nu);
  double c = 0.0;
  for (int j = 1; j <= Ns; ++j) {
    const auto idx = static_cast<std::size_t>(j * N);
    const Eigen::Matrix4d& Q = (j == Ns) ? Q_f : config.Q_step;
    const Eigen::MatrixXd& G = geom.gain[idx];
    const Eigen::Vector4d e = geom.offset[idx] - x_des[static_cast<std::size_t>(j - 1)].state.vec();
    H.noalias() += G.transpose() * Q * G;
    f.noalias() += G.transpose() * (Q * e);
    c += e.dot(Q * e);
  }
  out.qp.hessian = 0.5 * (H + H.transpose());
  out.qp.gradient = f;
  out.cost_offset = c;

  LinearInequalitySet rows(nu);
  if (config.state_constraints) {
    std::vector<TerrainPlane> uniform;
    std::span<const TerrainPlane> ter = sample_terrain;
    if (ter.empty()) {
      uniform.assign(static_cast<std::size_t>(total + 1), terrain);
      ter = uniform;
    }
    std::vector<Stance> step_stances;
    for (const auto& d : x_des) step_stances.push_back(d.stance);
    rows.append(build_state_constraints(config.workspace, ter, step_stances, geom));
  }
  if (config.input_constraints) {
    std::vector<Stance> placing;
    placing.push_back(flipped(x_des[0].stance));
    for (int j = 1; j < Ns; ++j) placing.push_back(x_des[static_cast<std::size_t>(j - 1)].stance);
    rows.append(build_input_constraints(config.workspace, placing));
  }
  out.qp.constraints = std::move(rows);
  return out;
}

std::vector<DesiredImpactState> desired_sequence(const GaitCommand& cmd,
                                                 Stance stance, int steps,
                                                 const RobotParams& params,
                                                 const TerrainPlane& terrain) {
  const double Ly = velocity_to_momentum(cmd.vx_des, params, terrain);
  std::vector<DesiredImpactState> seq;
  seq.reserve(static_cast<std::size_t>(steps));
  for (int j = 1; j <= steps; ++j) {
    seq.push_back(desired_impact_state(Ly, cmd, stance_schedule(j, stance),
                                       params, terrain));
  }
  return seq;
}

FootPlan plan_footsteps(const AlipState& x_t, double time_remaining,
                        const GaitCommand& cmd, Stance stance,
                        const MpcConfig& config, const RobotParams& params,
                        const TerrainPlane& terrain,
                        std::span<const TerrainPlane> sample_terrain,
                        std::span<const RowKey> warm_start,
                        const Eigen::Matrix4d* Q_f) {
  FootPlan plan;
  plan.x0 = predict_to_impact(x_t, time_remaining, params, terrain);
  plan.x_des = desired_sequence(cmd, stance, config.horizon_steps, params, terrain);

  Eigen::Matrix4d terminal;
  if (Q_f != nullptr) {
    terminal = *Q_f;
  } else if (config.Q_f) {
    terminal = *config.Q_f;
  } else {
    terminal = dare_terminal_cost(params, terrain, config.Q_step,
                                  config.terminal_mode, config.regularization)
                   .P;
  }

  const CondensedProblem prob =
      condense(plan.x0, plan.x_des, config, params, terrain, terminal, sample_terrain);
  const auto& rows = prob.qp.constraints.rows();

  std::vector<int> warm_idx;
  if (!warm_start.empty()) {
    std::vector<RowKey> keys(warm_start.begin(), warm_start.end());
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::binary_search(keys.begin(), keys.end(), key_of(rows[i]))) {
        warm_idx.push_back(static_cast<int>(i));
      }
    }
  }

  plan.solution = solve_qp(prob.qp, warm_idx);
  const Eigen::VectorXd& U = plan.solution.primal;
  plan.u_sequence.resize(static_cast<std::size_t>(config.horizon_steps));
  for (int j = 0; j < config.horizon_steps; ++j) {
    plan.u_sequence[static_cast<std::size_t>(j)] = U.segment<2>(2 * j);
  }
  plan.u_first = plan.u_sequence.front();
  plan.predicted.reserve(prob.geometry.offset.size());
  for (std::size_t i = 0; i < prob.geometry.offset.size(); ++i) {
    plan.predicted.emplace_back(prob.geometry.offset[i] + prob.geometry.gain[i] * U);
  }
  plan.cost = prob.cost(U);
  for (int r : plan.solution.active_set) {
    plan.active_keys.push_back(key_of(rows[static_cast<std::size_t>(r)]));
  }
  for (int r : plan.solution.certificate) {
    plan.violated.push_back(prob.qp.constraints.describe(static_cast<std::size_t>(r)));
  }
  return plan;
}

Eigen::Vector2d deadbeat_one_step(const AlipState& x0,
                                  const Eigen::Vector2d& target_momenta,
                                  const RobotParams& params,
                                  const TerrainPlane& terrain) {
  const Eigen::Matrix4d Phi = step_transition(params, terrain, params.step_period);
  const Eigen::Matrix<double, 2, 4> PhiL = Phi.bottomRows<2>();
  const Eigen::Matrix2d M = PhiL * impact_matrix();
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (std::abs(M.determinant()) <= 1e-14 * scale * scale) {
    throw InvalidArgument("deadbeat_one_step: placement-to-momentum map is singular");
  }
  return M.partialPivLu().solve(target_momenta - PhiL * x0.vec());
}

Planner::Planner(MpcConfig config, RobotParams params)
    : config_(std::move(config)), params_(params) {
  config_.validate();
  params_.validate();
}

const Eigen::Matrix4d& Planner::terminal_weight(const TerrainPlane& terrain) {
  if (config_.Q_f) return *config_.Q_f;
  if (!cached_zH_ || *cached_zH_ != terrain.z_H) {
    cached_Qf_ = dare_terminal_cost(params_, terrain, config_.Q_step,
                                    config_.terminal_mode, config_.regularization)
                     .P;
    cached_zH_ = terrain.z_H;
  }
  return cached_Qf_;
}

Planner::Result Planner::plan(const AlipState& x_t, double time_remaining,
                              const GaitCommand& cmd, Stance stance,
                              const TerrainPlane& terrain,
                              std::span<const TerrainPlane> sample_terrain,
                              long step_index) {
  // shift the cached working set when the step counter advances
  if (last_step_ >= 0 && step_index != last_step_) {
    const long shift = step_index - last_step_;
    std::vector<RowKey> shifted;
    for (const auto& [tag, sample, side] : last_active_) {
      const long moved = is_input(tag) ? sample - shift
                                       : sample - shift * config_.samples_per_step;
      if ((is_input(tag) && moved >= 0) || (!is_input(tag) && moved >= 1)) {
        shifted.emplace_back(tag, static_cast<int>(moved), side);
      }
    }
    last_active_ = std::move(shifted);
  }
  last_step_ = step_index;

  Result out;
  const Eigen::Matrix4d& Qf = terminal_weight(terrain);
  out.plan = plan_footsteps(x_t, time_remaining, cmd, stance, config_, params_,
                            terrain, sample_terrain, last_active_, &Qf);
  if (out.plan.feasible()) {
    out.u_applied = out.plan.u_first;
    last_active_ = out.plan.active_keys;
    return out;
  }

  out.fallback_used = true;
  last_active_.clear();
  const WorkspaceConfig& ws = config_.workspace;
  Eigen::Vector2d u =
      deadbeat_one_step(out.plan.x0, out.plan.x_des.front().state.momentum(),
                        params_, terrain);
  const Interval& uy = ws.u_y_for(stance);
  u[0] = std::clamp(u[0], ws.u_x.lower, ws.u_x.upper);
  u[1] = std::clamp(u[1], uy.lower, uy.upper);
  out.u_applied = u;
  return out;
}

}  // namespace alipmpc
