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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alipmpc/alip_model.hpp"

namespace alipmpc {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return v >= lower && v <= upper; }
  Interval mirrored() const { return {-upper, -lower}; }
};

/// Mechanical and foot-placement boxes plus the friction safety factor.
/// Lateral intervals are per stance side; the right-stance intervals default
/// to the mirror images of the left-stance ones.
struct WorkspaceConfig {
  Interval x_c{-0.5, 0.5};
  Interval y_c_left{-0.35, -0.04};
  Interval y_c_right{0.04, 0.35};
  Interval u_x{-0.6, 0.6};
  Interval u_y_left{-0.45, -0.10};
  Interval u_y_right{0.10, 0.45};
  double mu_safety_factor = 1.0 / std::sqrt(2.0);

  /// Throws InvalidArgument on an empty interval or a safety factor outside
  /// (0, 1].
  void validate() const;

  const Interval& y_c_for(Stance s) const {
    return s == Stance::kLeft ? y_c_left : y_c_right;
  }
  const Interval& u_y_for(Stance s) const {
    return s == Stance::kLeft ? u_y_left : u_y_right;
  }
};

enum class ConstraintTag { kMechX, kMechY, kSlipX, kSlipY, kInputX, kInputY };

const char* to_string(ConstraintTag tag);

/// One row a^T U <= b together with where it came from.
struct InequalityRow {
  Eigen::VectorXd coeffs;
  double upper = 0.0;
  ConstraintTag tag = ConstraintTag::kMechX;
  int sample = 0;  // intra-step sample index (state rows) or step index (input rows)
  int side = 1;    // +1: upper bound on the physical quantity, -1: lower bound
};

class LinearInequalitySet {
 public:
  explicit LinearInequalitySet(int num_vars = 0) : num_vars_(num_vars) {}

  int num_vars() const { return num_vars_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<InequalityRow>& rows() const { return rows_; }
  const InequalityRow& operator[](std::size_t i) const { return rows_[i]; }

  void add(InequalityRow row);
  void append(const LinearInequalitySet& other);

  Eigen::MatrixXd matrix() const;
  Eigen::VectorXd bounds() const;

  /// Human-readable provenance, e.g. "slip-x upper @ sample 12".
  std::string describe(std::size_t i) const;

 private:
  int num_vars_;
  std::vector<InequalityRow> rows_;
};

/// Symmetric bound on the CoM offset along one axis from the linearised
/// friction cone: (mu' - k) z_H / (1 + k^2) with mu' = safety_factor * mu.
/// Throws SlopeExceedsFriction if mu' <= |k|.
double slip_bound(double k, double mu, double z_H, double safety_factor);

/// Ground reaction force ratios (F_x/F_z, F_y/F_z) for a force directed
/// along the leg. Throws SingularityError if the CoM is not above the plane.
Eigen::Vector2d grf_ratios(double x_c, double y_c, const TerrainPlane& terrain);

/// Affine map from the decision vector U to the state at every horizon
/// sample: x_i = offset[i] + gain[i] * U.
struct HorizonGeometry {
  int samples_per_step = 1;
  int num_steps = 1;
  std::vector<Eigen::Vector4d> offset;
  std::vector<Eigen::MatrixXd> gain;

  int num_samples() const { return samples_per_step * num_steps; }
  int num_vars() const { return 2 * num_steps; }
};

/// Box and slip rows on every sample 1..N_dt*N_s, over U.
/// `step_stances[j]` is the stance during step j+1 of the horizon (the step
/// that starts after placement j). `sample_terrain[i]` is the terrain the
/// controller assumes at sample i (index 0 unused).
LinearInequalitySet build_state_constraints(
    const WorkspaceConfig& config, std::span<const TerrainPlane> sample_terrain,
    std::span<const Stance> step_stances, const HorizonGeometry& geometry);

/// Box rows on each placement u_j; `placing_stances[j]` is the stance foot
/// from which u_j is measured.
LinearInequalitySet build_input_constraints(
    const WorkspaceConfig& config, std::span<const Stance> placing_stances);

}  // namespace alipmpc
