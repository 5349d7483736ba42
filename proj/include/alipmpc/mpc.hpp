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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/constraints.hpp"
#include "alipmpc/dare.hpp"
#include "alipmpc/qp.hpp"
#include "alipmpc/reference.hpp"

namespace alipmpc {

/// Default running weight: positions above momenta; momenta are mostly
/// handled by the terminal cost.
Eigen::Matrix4d default_step_weight();

struct MpcConfig {
  int horizon_steps = 4;       // N_s
  int samples_per_step = 30;   // N_dt
  Eigen::Matrix4d Q_step = default_step_weight();
  /// Terminal weight. Empty: computed by dare_terminal_cost from Q_step.
  std::optional<Eigen::Matrix4d> Q_f;
  TerminalCostMode terminal_mode = TerminalCostMode::kOneStep;
  WorkspaceConfig workspace;
  double regularization = 1e-9;
  bool state_constraints = true;
  bool input_constraints = true;

  void validate() const;
};

/// QP over U = [u_0; ...; u_{N_s-1}] plus the affine state map behind it.
/// The full cost is J(U) = U'HU + 2 f'U + cost_offset, i.e. twice the QP
/// objective plus a constant.
struct CondensedProblem {
  QpProblem qp;
  HorizonGeometry geometry;
  double cost_offset = 0.0;

  double cost(const Eigen::VectorXd& U) const;
};

/// Builds the condensed QP. x_des[j] is the desired pre-impact state at the
/// end of horizon step j+1, whose stance must alternate. sample_terrain, if
/// non-empty, gives the terrain assumed at every sample 0..N_dt*N_s; the
/// dynamics use `terrain`.
CondensedProblem condense(const AlipState& x0,
                          std::span<const DesiredImpactState> x_des,
                          const MpcConfig& config, const RobotParams& params,
                          const TerrainPlane& terrain,
                          const Eigen::Matrix4d& Q_f,
                          std::span<const TerrainPlane> sample_terrain = {});

using RowKey = std::tuple<int, int, int>;  // (tag, sample or step, side)

/// Result of one receding-horizon solve.
struct FootPlan {
  Eigen::Vector2d u_first = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> u_sequence;
  AlipState x0;                          // predicted pre-impact state
  std::vector<AlipState> predicted;      // samples 0..N_dt*N_s
  std::vector<DesiredImpactState> x_des;
  QpSolution solution;
  double cost = 0.0;                     // J at the returned U
  /// Provenance of the rows proving infeasibility (empty when feasible).
  std::vector<std::string> violated;
  /// Active rows as (tag, sample, side), used for warm starting.
  std::vector<RowKey> active_keys;

  bool feasible() const { return solution.status == QpStatus::kOptimal; }
};

/// Per-step desired states over the horizon for the step after the current
/// one onward. `stance` is the current stance.
std::vector<DesiredImpactState> desired_sequence(const GaitCommand& cmd,
                                                 Stance stance, int steps,
                                                 const RobotParams& params,
                                                 const TerrainPlane& terrain);

/// One MPC solve from the measured state x_t with `time_remaining` left in
/// the current step. Infeasibility is reported in the returned plan, not
/// thrown. `Q_f` overrides the terminal weight of `config` when given.
FootPlan plan_footsteps(const AlipState& x_t, double time_remaining,
                        const GaitCommand& cmd, Stance stance,
                        const MpcConfig& config, const RobotParams& params,
                        const TerrainPlane& terrain,
                        std::span<const TerrainPlane> sample_terrain = {},
                        std::span<const RowKey> warm_start = {},
                        const Eigen::Matrix4d* Q_f = nullptr);

/// Placement that brings (L_x, L_y) to `target_momenta` at the end of the
/// next step, given the pre-impact state x0.
Eigen::Vector2d deadbeat_one_step(const AlipState& x0,
                                  const Eigen::Vector2d& target_momenta,
                                  const RobotParams& params,
                                  const TerrainPlane& terrain);

/// Receding-horizon controller with cached terminal weight and warm start.
/// Falls back to the clamped deadbeat placement when the QP is infeasible.
class Planner {
 public:
  Planner(MpcConfig config, RobotParams params);

  struct Result {
    FootPlan plan;
    Eigen::Vector2d u_applied = Eigen::Vector2d::Zero();
    bool fallback_used = false;
  };

  /// `step_index` identifies the current step; when it advances the cached
  /// active set is shifted by one step.
  Result plan(const AlipState& x_t, double time_remaining,
              const GaitCommand& cmd, Stance stance,
              const TerrainPlane& terrain,
              std::span<const TerrainPlane> sample_terrain, long step_index);

  const MpcConfig& config() const { return config_; }
  const Eigen::Matrix4d& terminal_weight(const TerrainPlane& terrain);

 private:
  MpcConfig config_;
  RobotParams params_;
  std::optional<double> cached_zH_;
  Eigen::Matrix4d cached_Qf_ = Eigen::Matrix4d::Zero();
  std::vector<RowKey> last_active_;
  long last_step_ = -1;
};

}  // namespace alipmpc
