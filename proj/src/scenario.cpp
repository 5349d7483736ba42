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

#include "alipmpc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    std::ostringstream os;
    os << source_;
    const YAML::Mark mark = node.Mark();
    if (mark.line >= 0) os << ":" << mark.line + 1 << ":" << mark.column + 1;
    os << ": " << what;
    throw ScenarioError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path + ": expected a mapping");
  }

  void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed,
                  const std::string& path) const {
    require_map(node, path);
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, "unknown key '" + path + "." + key + "'");
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& path) const {
    if (!node.IsScalar()) fail(node, path + ": expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, path + ": wrong type");
    }
  }

  template <typename T>
  void read(const YAML::Node& map, const char* key, T& out,
            const std::string& path) const {
    if (const YAML::Node n = map[key]) out = scalar<T>(n, path + "." + key);
  }

  Interval interval(const YAML::Node& node, const std::string& path) const {
    if (!node.IsSequence() || node.size() != 2) {
      fail(node, path + ": expected [lower, upper]");
    }
    Interval iv{scalar<double>(node[0], path), scalar<double>(node[1], path)};
    if (iv.lower > iv.upper) fail(node, path + ": empty interval");
    return iv;
  }

  void read_interval(const YAML::Node& map, const char* key, Interval& out,
                     const std::string& path) const {
    if (const YAML::Node n = map[key]) out = interval(n, path + "." + key);
  }

  Stance stance(const YAML::Node& node, const std::string& path) const {
    const auto s = scalar<std::string>(node, path);
    if (s == "left") return Stance::kLeft;
    if (s == "right") return Stance::kRight;
    fail(node, path + ": expected 'left' or 'right'");
  }

 private:
  std::string source_;
};

void parse_robot(const Parser& p, const YAML::Node& n, RobotParams& robot) {
  p.check_keys(n, {"mass", "gravity", "step_period", "step_width"}, "robot");
  p.read(n, "mass", robot.mass, "robot");
  p.read(n, "gravity", robot.gravity, "robot");
  p.read(n, "step_period", robot.step_period, "robot");
  p.read(n, "step_width", robot.step_width, "robot");
  try {
    robot.validate();
  } catch (const InvalidArgument& e) {
    p.fail(n, std::string("robot: ") + e.what());
  }
}

void parse_workspace(const Parser& p, const YAML::Node& n, WorkspaceConfig& ws) {
  p.check_keys(n, {"x_c", "y_c_left", "y_c_right", "u_x", "u_y_left", "u_y_right",
                   "mu_safety_factor"},
               "controller.workspace");
  const std::string path = "controller.workspace";
  p.read_interval(n, "x_c", ws.x_c, path);
  if (n["y_c_left"]) {
    p.read_interval(n, "y_c_left", ws.y_c_left, path);
    ws.y_c_right = ws.y_c_left.mirrored();
  }
  p.read_interval(n, "y_c_right", ws.y_c_right, path);
  p.read_interval(n, "u_x", ws.u_x, path);
  if (n["u_y_left"]) {
    p.read_interval(n, "u_y_left", ws.u_y_left, path);
    ws.u_y_right = ws.u_y_left.mirrored();
  }
  p.read_interval(n, "u_y_right", ws.u_y_right, path);
  p.read(n, "mu_safety_factor", ws.mu_safety_factor, path);
}

Eigen::Matrix4d parse_weight(const Parser& p, const YAML::Node& n,
                             const std::string& path) {
  if (!n.IsSequence() || (n.size() != 4 && n.size() != 16)) {
    p.fail(n, path + ": expected 4 diagonal entries or 16 row-major entries");
  }
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  if (n.size() == 4) {
    for (int i = 0; i < 4; ++i) W(i, i) = p.scalar<double>(n[i], path);
  } else {
    for (int i = 0; i < 16; ++i) W(i / 4, i % 4) = p.scalar<double>(n[i], path);
  }
  return W;
}

void parse_controller(const Parser& p, const YAML::Node& n, ControllerSettings& c) {
  p.check_keys(n, {"period", "horizon", "samples_per_step", "q_step", "q_f",
                   "terminal", "regularization", "terrain_blind", "clearance",
                   "workspace", "state_constraints", "input_constraints"},
               "controller");
  const std::string path = "controller";
  p.read(n, "period", c.period, path);
  p.read(n, "horizon", c.mpc.horizon_steps, path);
  p.read(n, "samples_per_step", c.mpc.samples_per_step, path);
  p.read(n, "regularization", c.mpc.regularization, path);
  p.read(n, "terrain_blind", c.terrain_blind, path);
  p.read(n, "state_constraints", c.mpc.state_constraints, path);
  p.read(n, "input_constraints", c.mpc.input_constraints, path);
  if (const YAML::Node q = n["q_step"]) c.mpc.Q_step = parse_weight(p, q, "controller.q_step");
  if (const YAML::Node q = n["q_f"]) c.mpc.Q_f = parse_weight(p, q, "controller.q_f");
  if (const YAML::Node t = n["terminal"]) {
    const auto mode = p.scalar<std::string>(t, "controller.terminal");
    if (mode == "one-step") {
      c.mpc.terminal_mode = TerminalCostMode::kOneStep;
    } else if (mode == "two-step-lifted") {
      c.mpc.terminal_mode = TerminalCostMode::kTwoStepLifted;
    } else {
      p.fail(t, "controller.terminal: expected 'one-step' or 'two-step-lifted'");
    }
  }
  if (const YAML::Node cl = n["clearance"]) {
    p.check_keys(cl, {"s_cl", "z_cl"}, "controller.clearance");
    p.read(cl, "s_cl", c.clearance.s_cl, "controller.clearance");
    p.read(cl, "z_cl", c.clearance.z_cl, "controller.clearance");
  }
  if (const YAML::Node ws = n["workspace"]) parse_workspace(p, ws, c.mpc.workspace);
}

}  // namespace

const char* to_string(PlantModel model) {
  return model == PlantModel::kAlip ? "alip" : "exact";
}

void Scenario::validate() const {
  const auto bad = [](const std::string& what) { throw ScenarioError(what); };
  if (schema_version != kScenarioSchemaVersion) {
    bad("unsupported schema_version " + std::to_string(schema_version));
  }
  try {
    robot.validate();
    for (const auto& seg : terrain) seg.terrain.validate();
    for (const auto& seg : commands) seg.command.validate();
    controller.mpc.validate();
  } catch (const InvalidArgument& e) {
    bad(e.what());
  }
  if (terrain.empty() || terrain.front().t_start != 0.0) {
    bad("terrain schedule must start at t = 0");
  }
  if (commands.empty() || commands.front().t_start != 0.0) {
    bad("command schedule must start at t = 0");
  }
  for (std::size_t i = 1; i < terrain.size(); ++i) {
    if (!(terrain[i].t_start > terrain[i - 1].t_start)) {
      bad("terrain schedule must be sorted by t_start");
    }
  }
  for (std::size_t i = 1; i < commands.size(); ++i) {
    if (!(commands[i].t_start > commands[i - 1].t_start)) {
      bad("command schedule must be sorted by t_start");
    }
  }
  if (controller.mpc.state_constraints) {
    const double safety = controller.mpc.workspace.mu_safety_factor;
    for (const auto& seg : terrain) {
      const double mu_eff = safety * seg.terrain.mu;
      if (mu_eff <= std::abs(seg.terrain.k_x) || mu_eff <= std::abs(seg.terrain.k_y)) {
        throw SlopeExceedsFriction("terrain segment at t = " + std::to_string(seg.t_start) +
                                   " is steeper than the effective friction allows");
      }
    }
  }
  const auto multiple_of = [](double a, double b) {
    const double r = a / b;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
  };
  if (!(duration > 0.0) || !multiple_of(duration, robot.step_period)) {
    bad("duration must be a positive multiple of the step period");
  }
  if (!(plant_step > 0.0) || !multiple_of(robot.step_period, plant_step)) {
    bad("step period must be a multiple of the plant step");
  }
  if (!(controller.period > 0.0) || !multiple_of(controller.period, plant_step)) {
    bad("controller period must be a positive multiple of the plant step");
  }
  if (!(controller.clearance.s_cl > 0.0 && controller.clearance.s_cl < 1.0)) {
    bad("clearance s_cl must lie in (0, 1)");
  }
  if (initial_state && !initial_state->is_finite()) bad("initial state must be finite");
  if (!(disturbance.frequency >= 0.0) || !std::isfinite(disturbance.amplitude_x) ||
      !std::isfinite(disturbance.amplitude_y)) {
    bad("disturbance must be finite with non-negative frequency");
  }
}

const TerrainPlane& Scenario::terrain_at(double t) const {
  const TerrainSegment* active = &terrain.front();
  for (const auto& seg : terrain) {
    if (seg.t_start <= t) active = &seg;
  }
  return active->terrain;
}

const GaitCommand& Scenario::command_at(double t) const {
  const CommandSegment* active = &commands.front();
  for (const auto& seg : commands) {
    if (seg.t_start <= t) active = &seg;
  }
  return active->command;
}

TerrainPlane Scenario::visible_terrain(double t_query, double t_now) const {
  const TerrainSegment* active = &terrain.front();
  for (const auto& seg : terrain) {
    if (seg.t_start <= t_query && (seg.preview || seg.t_start <= t_now)) active = &seg;
  }
  return active->terrain;
}

AlipState Scenario::resolved_initial_state() const {
  if (initial_state) return *initial_state;
  const GaitCommand& cmd = commands.front().command;
  const TerrainPlane& ter = terrain.front().terrain;
  const auto end = desired_impact_state(velocity_to_momentum(cmd.vx_des, robot, ter),
                                        cmd, initial_stance, robot, ter);
  return orbit_step_start(end.state, robot, ter);
}

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  const Parser p(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source_name + ":" + std::to_string(e.mark.line + 1) + ":" +
                        std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  p.check_keys(root, {"schema_version", "name", "robot", "duration", "plant",
                      "terrain", "commands", "controller", "initial", "seed",
                      "hard_fail", "record_timing"},
               "scenario");

  Scenario sc;
  if (!root["schema_version"]) p.fail(root, "missing schema_version");
  p.read(root, "schema_version", sc.schema_version, "scenario");
  if (sc.schema_version != kScenarioSchemaVersion) {
    p.fail(root["schema_version"], "unsupported schema_version");
  }
  p.read(root, "name", sc.name, "scenario");
  if (!root["robot"]) p.fail(root, "missing robot");
  parse_robot(p, root["robot"], sc.robot);
  if (!root["duration"]) p.fail(root, "missing duration");
  p.read(root, "duration", sc.duration, "scenario");
  p.read(root, "seed", sc.seed, "scenario");
  p.read(root, "hard_fail", sc.hard_fail, "scenario");
  p.read(root, "record_timing", sc.record_timing, "scenario");

  if (const YAML::Node n = root["plant"]) {
    p.check_keys(n, {"model", "step", "disturbance"}, "plant");
    if (const YAML::Node m = n["model"]) {
      const auto model = p.scalar<std::string>(m, "plant.model");
      if (model == "alip") {
        sc.plant = PlantModel::kAlip;
      } else if (model == "exact") {
        sc.plant = PlantModel::kExactPre;
      } else {
        p.fail(m, "plant.model: expected 'alip' or 'exact'");
      }
    }
    p.read(n, "step", sc.plant_step, "plant");
    if (const YAML::Node d = n["disturbance"]) {
      p.check_keys(d, {"amplitude", "frequency"}, "plant.disturbance");
      if (const YAML::Node a = d["amplitude"]) {
        if (!a.IsSequence() || a.size() != 2) p.fail(a, "plant.disturbance.amplitude: expected [x, y]");
        sc.disturbance.amplitude_x = p.scalar<double>(a[0], "plant.disturbance.amplitude");
        sc.disturbance.amplitude_y = p.scalar<double>(a[1], "plant.disturbance.amplitude");
      }
      p.read(d, "frequency", sc.disturbance.frequency, "plant.disturbance");
    }
  }

  if (const YAML::Node n = root["terrain"]) {
    if (!n.IsSequence() || n.size() == 0) p.fail(n, "terrain: expected a non-empty list");
    sc.terrain.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const YAML::Node e = n[i];
      const std::string path = "terrain[" + std::to_string(i) + "]";
      p.check_keys(e, {"t", "k_x", "k_y", "slope_x_deg", "slope_y_deg", "mu", "z_H",
                       "preview"},
                   path);
      TerrainSegment seg;
      p.read(e, "t", seg.t_start, path);
      p.read(e, "k_x", seg.terrain.k_x, path);
      p.read(e, "k_y", seg.terrain.k_y, path);
      if (e["slope_x_deg"] && e["k_x"]) p.fail(e, path + ": give k_x or slope_x_deg, not both");
      if (e["slope_y_deg"] && e["k_y"]) p.fail(e, path + ": give k_y or slope_y_deg, not both");
      constexpr double kDeg = 3.14159265358979323846 / 180.0;
      if (const YAML::Node d = e["slope_x_deg"]) {
        seg.terrain.k_x = std::tan(p.scalar<double>(d, path) * kDeg);
      }
      if (const YAML::Node d = e["slope_y_deg"]) {
        seg.terrain.k_y = std::tan(p.scalar<double>(d, path) * kDeg);
      }
      p.read(e, "mu", seg.terrain.mu, path);
      p.read(e, "z_H", seg.terrain.z_H, path);
      p.read(e, "preview", seg.preview, path);
      if (!sc.terrain.empty() && !(seg.t_start > sc.terrain.back().t_start)) {
        p.fail(e, path + ": terrain schedule must be sorted by t");
      }
      sc.terrain.push_back(seg);
    }
    if (sc.terrain.front().t_start != 0.0) p.fail(n, "terrain: first entry must start at t = 0");
  }

  if (const YAML::Node n = root["commands"]) {
    if (!n.IsSequence() || n.size() == 0) p.fail(n, "commands: expected a non-empty list");
    sc.commands.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const YAML::Node e = n[i];
      const std::string path = "commands[" + std::to_string(i) + "]";
      p.check_keys(e, {"t", "vx", "vy", "lx_offset", "delta_psi", "step_width"}, path);
      CommandSegment seg;
      seg.command.step_width = sc.robot.step_width;
      p.read(e, "t", seg.t_start, path);
      p.read(e, "vx", seg.command.vx_des, path);
      p.read(e, "lx_offset", seg.command.lx_offset, path);
      p.read(e, "delta_psi", seg.command.delta_psi, path);
      p.read(e, "step_width", seg.command.step_width, path);
      if (const YAML::Node vy = e["vy"]) {
        if (e["lx_offset"]) p.fail(e, path + ": give vy or lx_offset, not both");
        seg.command.lx_offset = lateral_velocity_to_offset(
            p.scalar<double>(vy, path + ".vy"), sc.robot, sc.terrain_at(seg.t_start));
      }
      if (!sc.commands.empty() && !(seg.t_start > sc.commands.back().t_start)) {
        p.fail(e, path + ": command schedule must be sorted by t");
      }
      sc.commands.push_back(seg);
    }
    if (sc.commands.front().t_start != 0.0) p.fail(n, "commands: first entry must start at t = 0");
  } else {
    sc.commands.front().command.step_width = sc.robot.step_width;
  }

  if (const YAML::Node n = root["controller"]) parse_controller(p, n, sc.controller);

  if (const YAML::Node n = root["initial"]) {
    p.check_keys(n, {"state", "stance"}, "initial");
    if (const YAML::Node s = n["state"]) {
      if (!s.IsSequence() || s.size() != 4) p.fail(s, "initial.state: expected [x_c, y_c, L_x, L_y]");
      sc.initial_state = AlipState(p.scalar<double>(s[0], "initial.state"),
                                   p.scalar<double>(s[1], "initial.state"),
                                   p.scalar<double>(s[2], "initial.state"),
                                   p.scalar<double>(s[3], "initial.state"));
    }
    if (const YAML::Node s = n["stance"]) sc.initial_stance = p.stance(s, "initial.stance");
  }

  try {
    sc.validate();
  } catch (const ScenarioError& e) {
    throw ScenarioError(source_name + ": " + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string());
}

}  // namespace alipmpc
