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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "alipmpc/alip_model.hpp"
#include "alipmpc/mpc.hpp"
#include "alipmpc/reference.hpp"
#include "alipmpc/swing.hpp"

namespace alipmpc {

inline constexpr int kScenarioSchemaVersion = 1;

struct TerrainSegment {
  double t_start = 0.0;
  TerrainPlane terrain;
  /// Visible to the controller as soon as t_start enters its horizon
  /// (otherwise only once t_start has passed).
  bool preview = false;
};

struct CommandSegment {
  double t_start = 0.0;
  GaitCommand command;
};

enum class PlantModel { kAlip, kExactPre };

const char* to_string(PlantModel model);

/// L_c(t) = (a_x sin(2 pi f t + phase), a_y sin(2 pi f t + phase), 0), with
/// the phase drawn from the scenario seed.
struct Disturbance {
  double amplitude_x = 0.0;  // kg m^2/s
  double amplitude_y = 0.0;
  double frequency = 0.0;    // Hz

  bool active() const { return amplitude_x != 0.0 || amplitude_y != 0.0; }
};

struct ControllerSettings {
  MpcConfig mpc;
  double period = 0.004;       // s
  bool terrain_blind = false;  // controller assumes zero slopes
  Clearance clearance;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  RobotParams robot;
  std::vector<TerrainSegment> terrain{TerrainSegment{}};
  std::vector<CommandSegment> commands{CommandSegment{}};
  ControllerSettings controller;
  PlantModel plant = PlantModel::kAlip;
  double plant_step = 0.001;  // s
  Disturbance disturbance;
  double duration = 3.0;      // s, multiple of the step period
  /// Initial state at the start of a step. Empty: the periodic-orbit start
  /// state for the first command.
  std::optional<AlipState> initial_state;
  Stance initial_stance = Stance::kLeft;
  std::uint64_t seed = 0;
  bool hard_fail = false;      // stop at the first slip violation
  bool record_timing = false;  // wall-clock solve times in the log

  /// Throws ScenarioError naming the violated invariant.
  void validate() const;

  /// Segment active at time t (true plant-side values).
  const TerrainPlane& terrain_at(double t) const;
  const GaitCommand& command_at(double t) const;
  /// Terrain the controller assumes for time t_query, given it is now t_now.
  TerrainPlane visible_terrain(double t_query, double t_now) const;
  AlipState resolved_initial_state() const;
};

/// Parses YAML text. Unknown keys, wrong types and invariant violations throw
/// ScenarioError with the source name and line.
Scenario parse_scenario(const std::string& text,
                        const std::string& source_name = "<string>");

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace alipmpc
