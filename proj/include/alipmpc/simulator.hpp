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
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "alipmpc/scenario.hpp"

namespace alipmpc {

/// One plant sample. At an impact sample the state is the pre-impact state
/// and ufp holds the applied placement; otherwise ufp is NaN. mu_eff is the
/// friction the controller plans with (safety factor applied); the slip
/// bounds use the true friction coefficient.
struct LogRecord {
  double t = 0.0;
  long step_index = 0;
  int stance = 1;
  AlipState state;
  AlipState x0_pred;
  double k_x = 0.0;
  double k_y = 0.0;
  double mu_eff = 0.0;
  double vx_cmd = 0.0;
  Eigen::Vector2d ufp{std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
  double slip_bound_x = 0.0;
  double slip_bound_y = 0.0;
  std::string qp_status = "none";  // optimal | infeasible | max_iterations | none
  bool fallback = false;
  int qp_iters = 0;
  double solve_time_s = 0.0;

  bool is_impact() const { return !std::isnan(ufp[0]); }
};

enum class EventKind {
  kSlipViolation,
  kQpInfeasible,
  kFallbackUsed,
  kMechViolation,
  kPlantSingularity,
};

const char* to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::kSlipViolation;
  double t = 0.0;
  std::size_t sample = 0;  // index into SimLog::records
  std::string detail;
  bool terminal = false;
};

struct SimLog {
  std::vector<LogRecord> records;
  std::vector<Event> events;
  bool truncated = false;

  std::size_t impact_count() const;
  bool has_terminal_event() const;
};

/// Violations beyond this margin (m) are reported.
inline constexpr double kViolationTol = 1e-7;

/// Runs the scenario to completion (or to a terminal event). Deterministic:
/// identical scenarios yield bit-identical logs.
SimLog run_closed_loop(const Scenario& scenario);

/// Scans a finished log. Slip and mech violations are reported once per step
/// at the first offending sample; controller events once per step.
std::vector<Event> detect_events(const SimLog& log, const WorkspaceConfig& workspace);

/// Fixed CSV column order.
const std::vector<std::string>& log_columns();

void write_log_csv(const SimLog& log, const std::filesystem::path& path);
SimLog read_log_csv(const std::filesystem::path& path);

/// Mean lateral CoM velocity (world frame) over the last `steps` completed
/// steps, measured impact to impact.
double mean_lateral_velocity(const SimLog& log, int steps);
/// Same for the sagittal direction.
double mean_forward_velocity(const SimLog& log, int steps);

/// Runs independent scenarios concurrently (OpenMP).
std::vector<SimLog> run_batch(std::span<const Scenario> scenarios);
/// Serial reference for run_batch.
std::vector<SimLog> run_batch_serial(std::span<const Scenario> scenarios);

}  // namespace alipmpc
