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

#include "alipmpc/constraints.hpp"

#include <sstream>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

void check_interval(const Interval& iv, const char* name) {
  if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
    throw InvalidArgument(std::string(name) + ": interval must be finite");
  }
  if (iv.lower > iv.upper) {
    throw InvalidArgument(std::string(name) + ": empty interval");
  }
}

// Adds  coeff^T x_i <= upper  and  -coeff^T x_i <= -lower  rewritten over U.
void add_state_pair(LinearInequalitySet& set, const HorizonGeometry& geom,
                    int sample, int component, double lower, double upper,
                    ConstraintTag tag) {
  const Eigen::VectorXd a = geom.gain[sample].row(component).transpose();
  const double free = geom.offset[sample][component];
  set.add({a, upper - free, tag, sample, +1});
  set.add({-a, -(lower - free), tag, sample, -1});
}

}  // namespace

void WorkspaceConfig::validate() const {
  check_interval(x_c, "x_c");
  check_interval(y_c_left, "y_c (left stance)");
  check_interval(y_c_right, "y_c (right stance)");
  check_interval(u_x, "u_x");
  check_interval(u_y_left, "u_y (left stance)");
  check_interval(u_y_right, "u_y (right stance)");
  if (!(mu_safety_factor > 0.0) || mu_safety_factor > 1.0) {
    throw InvalidArgument("mu_safety_factor must lie in (0, 1]");
  }
}

const char* to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::kMechX: return "mech-x";
    case ConstraintTag::kMechY: return "mech-y";
    case ConstraintTag::kSlipX: return "slip-x";
    case ConstraintTag::kSlipY: return "slip-y";
    case ConstraintTag::kInputX: return "input-x";
    case ConstraintTag::kInputY: return "input-y";
  }
  return "?";
}

void LinearInequalitySet::add(InequalityRow row) {
  if (row.coeffs.size() != num_vars_) {
    throw InvalidArgument("inequality row has wrong dimension");
  }
  if (!row.coeffs.allFinite() || !std::isfinite(row.upper)) {
    throw InvalidArgument("inequality row must be finite");
  }
  rows_.push_back(std::move(row));
}

void LinearInequalitySet::append(const LinearInequalitySet& other) {
  if (other.num_vars_ != num_vars_) {
    throw InvalidArgument("cannot append inequality sets of different width");
  }
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

Eigen::MatrixXd LinearInequalitySet::matrix() const {
  Eigen::MatrixXd A(rows_.size(), num_vars_);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows_[i].coeffs.transpose();
  }
  return A;
}

Eigen::VectorXd LinearInequalitySet::bounds() const {
  Eigen::VectorXd b(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    b[static_cast<Eigen::Index>(i)] = rows_[i].upper;
  }
  return b;
}

std::string LinearInequalitySet::describe(std::size_t i) const {
  const InequalityRow& r = rows_.at(i);
  std::ostringstream os;
  const bool input = r.tag == ConstraintTag::kInputX ||
                     r.tag == ConstraintTag::kInputY;
  os << to_string(r.tag) << (r.side > 0 ? " upper" : " lower")
     << (input ? " @ step " : " @ sample ") << r.sample;
  return os.str();
}

double slip_bound(double k, double mu, double z_H, double safety_factor) {
  if (!std::isfinite(k) || !std::isfinite(mu) || !std::isfinite(z_H) ||
      !std::isfinite(safety_factor)) {
    throw InvalidArgument("slip_bound: non-finite input");
  }
  if (!(z_H > 0.0)) throw InvalidArgument("slip_bound: z_H must be positive");
  if (!(safety_factor > 0.0)) {
    throw InvalidArgument("slip_bound: safety factor must be positive");
  }
  const double mu_eff = safety_factor * mu;
  if (mu_eff <= std::abs(k)) {
    throw SlopeExceedsFriction("slope exceeds friction: |k| = " +
                               std::to_string(std::abs(k)) +
                               " >= mu' = " + std::to_string(mu_eff));
  }
  return (mu_eff - k) * z_H / (1.0 + k * k);
}

Eigen::Vector2d grf_ratios(double x_c, double y_c, const TerrainPlane& terrain) {
  const double d = terrain.k_x * x_c + terrain.k_y * y_c + terrain.z_H;
  if (!(d > 0.0)) {
    throw SingularityError("grf_ratios: CoM is not above the ground plane");
  }
  return {x_c / d, y_c / d};
}

LinearInequalitySet build_state_constraints(
    const WorkspaceConfig& config, std::span<const TerrainPlane> sample_terrain,
    std::span<const Stance> step_stances, const HorizonGeometry& geometry) {
  config.validate();
  const int N = geometry.samples_per_step;
  const int total = geometry.num_samples();
  if (static_cast<int>(step_stances.size()) != geometry.num_steps) {
    throw InvalidArgument("stance sequence length must equal the step count");
  }
  if (static_cast<int>(sample_terrain.size()) < total + 1 ||
      static_cast<int>(geometry.gain.size()) < total + 1 ||
      static_cast<int>(geometry.offset.size()) < total + 1) {
    throw InvalidArgument("horizon geometry / terrain shorter than the horizon");
  }

  LinearInequalitySet set(geometry.num_vars());
  for (int i = 1; i <= total; ++i) {
    const int step = (i - 1) / N;  // sample i lies in step 'step' (0-based)
    const Stance stance = step_stances[static_cast<std::size_t>(step)];
    const TerrainPlane& ter = sample_terrain[static_cast<std::size_t>(i)];
    const double sx = slip_bound(ter.k_x, ter.mu, ter.z_H, config.mu_safety_factor);
    const double sy = slip_bound(ter.k_y, ter.mu, ter.z_H, config.mu_safety_factor);
    const Interval& yc = config.y_c_for(stance);

    add_state_pair(set, geometry, i, 0, config.x_c.lower, config.x_c.upper,
                   ConstraintTag::kMechX);
    add_state_pair(set, geometry, i, 1, yc.lower, yc.upper, ConstraintTag::kMechY);
    add_state_pair(set, geometry, i, 0, -sx, sx, ConstraintTag::kSlipX);
    add_state_pair(set, geometry, i, 1, -sy, sy, ConstraintTag::kSlipY);
  }
  return set;
}

LinearInequalitySet build_input_constraints(
    const WorkspaceConfig& config, std::span<const Stance> placing_stances) {
  config.validate();
  const int steps = static_cast<int>(placing_stances.size());
  LinearInequalitySet set(2 * steps);
  for (int j = 0; j < steps; ++j) {
    const Interval& uy = config.u_y_for(placing_stances[static_cast<std::size_t>(j)]);
    Eigen::VectorXd ex = Eigen::VectorXd::Zero(2 * steps);
    Eigen::VectorXd ey = Eigen::VectorXd::Zero(2 * steps);
    ex[2 * j] = 1.0;
    ey[2 * j + 1] = 1.0;
    set.add({ex, config.u_x.upper, ConstraintTag::kInputX, j, +1});
    set.add({-ex, -config.u_x.lower, ConstraintTag::kInputX, j, -1});
    set.add({ey, uy.upper, ConstraintTag::kInputY, j, +1});
    set.add({-ey, -uy.lower, ConstraintTag::kInputY, j, -1});
  }
  return set;
}

}  // namespace alipmpc
