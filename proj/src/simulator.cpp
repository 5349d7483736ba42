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

#include "alipmpc/simulator.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "alipmpc/constraints.hpp"
#include "alipmpc/errors.hpp"

namespace alipmpc {

namespace {

long ticks_for(double duration, double h) { return std::lround(duration / h); }

TerrainPlane blinded(TerrainPlane t, bool blind) {
  if (blind) {
    t.k_x = 0.0;
    t.k_y = 0.0;
  }
  return t;
}

// Physical bound: true friction, no safety factor.
double safe_slip_bound(double k, const TerrainPlane& ter) {
  try {
    return slip_bound(k, ter.mu, ter.z_H, 1.0);
  } catch (const SlopeExceedsFriction&) {
    return 0.0;
  }
}

// Emits each (kind, step) at most once, at its first offending sample.
class EventScanner {
 public:
  EventScanner(const WorkspaceConfig& ws, bool hard_fail)
      : ws_(ws), hard_fail_(hard_fail) {}

  void scan(const LogRecord& r, std::size_t idx, std::vector<Event>& out) {
    const auto emit = [&](EventKind kind, std::string detail, bool terminal) {
      if (!seen_.emplace(static_cast<int>(kind), r.step_index).second) return;
      out.push_back({kind, r.t, idx, std::move(detail), terminal});
    };
    const double x = r.state.x_c();
    const double y = r.state.y_c();
    const auto fmt = [](const char* name, double v, double bound) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "|%s| = %.6g > %.6g", name, std::abs(v), bound);
      return std::string(buf);
    };
    if (std::abs(x) > r.slip_bound_x + kViolationTol) {
      emit(EventKind::kSlipViolation, fmt("x_c", x, r.slip_bound_x), hard_fail_);
    } else if (std::abs(y) > r.slip_bound_y + kViolationTol) {
      emit(EventKind::kSlipViolation, fmt("y_c", y, r.slip_bound_y), hard_fail_);
    }
    const Stance stance = r.stance > 0 ? Stance::kLeft : Stance::kRight;
    const Interval& yc = ws_.y_c_for(stance);
    const bool mech_x = x < ws_.x_c.lower - kViolationTol || x > ws_.x_c.upper + kViolationTol;
    const bool mech_y = y < yc.lower - kViolationTol || y > yc.upper + kViolationTol;
    if (mech_x || mech_y) {
      std::ostringstream os;
      os << (mech_x ? "x_c = " : "y_c = ") << (mech_x ? x : y) << " outside workspace";
      emit(EventKind::kMechViolation, os.str(), false);
    }
    if (r.qp_status == to_string(QpStatus::kInfeasible)) {
      emit(EventKind::kQpInfeasible, "QP infeasible", false);
    }
    if (r.fallback) emit(EventKind::kFallbackUsed, "deadbeat fallback applied", false);
  }

 private:
  const WorkspaceConfig& ws_;
  bool hard_fail_;
  std::set<std::pair<int, long>> seen_;
};

CentroidalProfile disturbance_profile(const Scenario& sc) {
  if (!sc.disturbance.active()) return zero_centroidal_profile();
  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * std::numbers::pi);
  const double phase = dist(rng);
  const Disturbance d = sc.disturbance;
  return [d, phase](double t) {
    const double s = std::sin(2.0 * std::numbers::pi * d.frequency * t + phase);
    return CentroidalMomentum{d.amplitude_x * s, d.amplitude_y * s, 0.0};
  };
}

struct WorldPoint {
  double t;
  Eigen::Vector2d com;
};

// CoM positions in the world frame at t = 0 and at every impact.
std::vector<WorldPoint> step_boundaries(const SimLog& log) {
  std::vector<WorldPoint> pts;
  if (log.records.empty()) return pts;
  Eigen::Vector2d foot = Eigen::Vector2d::Zero();
  pts.push_back({log.records.front().t, log.records.front().state.position()});
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    const LogRecord& r = log.records[i];
    if (!r.is_impact()) continue;
    pts.push_back({r.t, foot + r.state.position()});
    foot += r.ufp;
  }
  return pts;
}

Eigen::Vector2d mean_velocity(const SimLog& log, int steps) {
  if (steps < 1) throw InvalidArgument("mean velocity: steps must be >= 1");
  const auto pts = step_boundaries(log);
  if (static_cast<int>(pts.size()) < steps + 1) {
    throw InvalidArgument("mean velocity: log has fewer than the requested steps");
  }
  const WorldPoint& b = pts.back();
  const WorldPoint& a = pts[pts.size() - 1 - static_cast<std::size_t>(steps)];
  return (b.com - a.com) / (b.t - a.t);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSlipViolation: return "slip_violation";
    case EventKind::kQpInfeasible: return "qp_infeasible";
    case EventKind::kFallbackUsed: return "fallback_used";
    case EventKind::kMechViolation: return "mech_violation";
    case EventKind::kPlantSingularity: return "plant_singularity";
  }
  return "unknown";
}

std::size_t SimLog::impact_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.is_impact() ? 1 : 0;
  return n;
}

bool SimLog::has_terminal_event() const {
  for (const auto& e : events) {
    if (e.terminal) return true;
  }
  return false;
}

SimLog run_closed_loop(const Scenario& sc) {
  sc.validate();
  const RobotParams& robot = sc.robot;
  const ControllerSettings& ctl = sc.controller;
  const double h = sc.plant_step;
  const long total_ticks = ticks_for(sc.duration, h);
  const long step_ticks = ticks_for(robot.step_period, h);
  const long ctrl_ticks = ticks_for(ctl.period, h);
  const int N = ctl.mpc.samples_per_step;
  const int horizon_samples = N * ctl.mpc.horizon_steps;
  const double dt_sample = robot.step_period / N;
  const double safety = ctl.mpc.workspace.mu_safety_factor;
  const ComModel model =
      sc.plant == PlantModel::kAlip ? ComModel::kAlip : ComModel::kExactPre;
  const CentroidalProfile Lc = disturbance_profile(sc);

  Planner planner(ctl.mpc, robot);
  EventScanner scanner(ctl.mpc.workspace, sc.hard_fail);

  SimLog log;
  log.records.reserve(static_cast<std::size_t>(total_ticks) + 1);

  AlipState x = sc.resolved_initial_state();
  Stance stance = sc.initial_stance;
  long step_index = 0;
  long since = 0;  // plant ticks since the last impact

  // Swing foot start point relative to the stance toe.
  OutputInit init;
  {
    const GaitCommand& cmd = sc.command_at(0.0);
    const TerrainPlane& ter = sc.terrain_at(0.0);
    const Eigen::Vector2d prev = periodic_foot_placement(
        velocity_to_momentum(cmd.vx_des, robot, ter), cmd, flipped(stance), robot, ter);
    init.swing_x = -prev[0];
    init.swing_y = -prev[1];
    init.swing_z = ter.height_at(init.swing_x, init.swing_y);
  }

  Planner::Result last;
  bool have_plan = false;
  double last_solve_time = 0.0;
  std::vector<TerrainPlane> sample_terrain(static_cast<std::size_t>(horizon_samples) + 1);

  const auto solve = [&](double t, double remaining, const TerrainPlane& belief,
                         const GaitCommand& cmd) {
    for (int i = 0; i <= horizon_samples; ++i) {
      const double tq = t + remaining + i * dt_sample;
      sample_terrain[static_cast<std::size_t>(i)] =
          blinded(sc.visible_terrain(tq, t), ctl.terrain_blind);
    }
    const auto t0 = std::chrono::steady_clock::now();
    last = planner.plan(x, remaining, cmd, stance, belief, sample_terrain, step_index);
    const auto t1 = std::chrono::steady_clock::now();
    last_solve_time = sc.record_timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
    have_plan = true;
  };

  for (long k = 0; k <= total_ticks; ++k) {
    const double t = static_cast<double>(k) * h;
    const TerrainPlane& truth = sc.terrain_at(t);
    const TerrainPlane belief = blinded(sc.visible_terrain(t, t), ctl.terrain_blind);
    const GaitCommand& cmd = sc.command_at(t);
    const double t_since = static_cast<double>(since) * h;

    if (since % ctrl_ticks == 0 || !have_plan) {
      solve(t, std::clamp(robot.step_period - t_since, 0.0, robot.step_period), belief, cmd);
    }

    LogRecord rec;
    rec.t = t;
    rec.step_index = step_index;
    rec.stance = static_cast<int>(stance);
    rec.state = x;
    rec.x0_pred = last.plan.x0;
    rec.k_x = truth.k_x;
    rec.k_y = truth.k_y;
    rec.mu_eff = safety * truth.mu;
    rec.vx_cmd = cmd.vx_des;
    rec.slip_bound_x = safe_slip_bound(truth.k_x, truth);
    rec.slip_bound_y = safe_slip_bound(truth.k_y, truth);
    rec.qp_status = to_string(last.plan.solution.status);
    rec.fallback = last.fallback_used;
    rec.qp_iters = last.plan.solution.iterations;
    rec.solve_time_s = last_solve_time;

    // Touchdown. With a correct terrain belief the foot lands on schedule;
    // otherwise it lands where the swing reference meets the true ground.
    bool impact = false;
    Eigen::Vector2d landed = last.u_applied;
    {
      if (belief.k_x == truth.k_x && belief.k_y == truth.k_y) {
        impact = since == step_ticks;
      } else {
        SwingTargets targets;
        targets.foot_xy = last.u_applied;
        targets.foot_z = belief.height_at(last.u_applied[0], last.u_applied[1]);
        targets.delta_psi = cmd.delta_psi;
        targets.z_H = belief.z_H;
        targets.k_x = belief.k_x;
        targets.clearance = ctl.clearance;
        const double s = t_since / robot.step_period;
        const Eigen::Vector3d foot = swing_foot_position(s, init, targets);
        if (s > ctl.clearance.s_cl && foot[2] <= truth.height_at(foot[0], foot[1])) {
          impact = true;
          landed = foot.head<2>();
        } else if (since >= 2 * step_ticks) {
          impact = true;
        }
      }
    }
    if (impact) {
      rec.ufp = landed;
      if (k > 0) {
        const TerrainPlane& ending = sc.terrain_at(t - 0.5 * h);
        rec.k_x = ending.k_x;
        rec.k_y = ending.k_y;
        rec.mu_eff = safety * ending.mu;
        rec.slip_bound_x = safe_slip_bound(ending.k_x, ending);
        rec.slip_bound_y = safe_slip_bound(ending.k_y, ending);
      }
    }

    log.records.push_back(rec);
    scanner.scan(log.records.back(), log.records.size() - 1, log.events);
    if (log.has_terminal_event()) {
      log.truncated = k < total_ticks;
      break;
    }
    if (k == total_ticks) break;

    if (impact) {
      x = apply_impact(x, landed);
      stance = flipped(stance);
      ++step_index;
      since = 0;
      init = OutputInit{};
      init.swing_x = -landed[0];
      init.swing_y = -landed[1];
      init.swing_z = truth.height_at(init.swing_x, init.swing_y);
      // first solve of the new step, from the post-impact state
      solve(t, robot.step_period, belief, cmd);
    }

    try {
      x = rk4_step(x, t, h, Lc, robot, sc.terrain_at(t), model);
      if (!x.is_finite()) throw SingularityError("plant state became non-finite");
    } catch (const SingularityError& e) {
      log.events.push_back({EventKind::kPlantSingularity, t + h,
                            log.records.size() - 1, e.what(), true});
      log.truncated = true;
      break;
    }
    ++since;
  }
  return log;
}

std::vector<Event> detect_events(const SimLog& log, const WorkspaceConfig& workspace) {
  std::vector<Event> out;
  EventScanner scanner(workspace, false);
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    scanner.scan(log.records[i], i, out);
  }
  return out;
}

const std::vector<std::string>& log_columns() {
  static const std::vector<std::string> cols = {
      "t",          "step_index", "stance",       "x_c",          "y_c",
      "L_x",        "L_y",        "x0_pred_xc",   "x0_pred_yc",   "x0_pred_Lx",
      "x0_pred_Ly", "k_x",        "k_y",          "mu_eff",       "vx_cmd",
      "ufp_x",      "ufp_y",      "slip_bound_x", "slip_bound_y", "qp_status",
      "qp_iters",   "solve_time_s"};
  return cols;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_num(const std::string& s, std::size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("log csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_log_csv(const SimLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  const auto& cols = log_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : log.records) {
    out << num(r.t) << ',' << r.step_index << ',' << r.stance;
    for (int i = 0; i < 4; ++i) out << ',' << num(r.state.vec()[i]);
    for (int i = 0; i < 4; ++i) out << ',' << num(r.x0_pred.vec()[i]);
    out << ',' << num(r.k_x) << ',' << num(r.k_y) << ',' << num(r.mu_eff) << ','
        << num(r.vx_cmd) << ',' << num(r.ufp[0]) << ',' << num(r.ufp[1]) << ','
        << num(r.slip_bound_x) << ',' << num(r.slip_bound_y) << ',' << r.qp_status
        << (r.fallback ? ":fallback" : "") << ',' << r.qp_iters << ','
        << num(r.solve_time_s) << '\n';
  }
  if (!out) throw InvalidArgument("write failed for " + path.string());
}

SimLog read_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  const auto& cols = log_columns();
  std::string line;
  std::getline(in, line);
  {
    std::string expect;
    for (std::size_t i = 0; i < cols.size(); ++i) expect += (i ? "," : "") + cols[i];
    if (line != expect) throw InvalidArgument("log csv: unexpected header");
  }
  SimLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != cols.size()) {
      throw InvalidArgument("log csv line " + std::to_string(lineno) + ": wrong field count");
    }
    LogRecord r;
    r.t = parse_num(f[0], lineno);
    r.step_index = std::lround(parse_num(f[1], lineno));
    r.stance = static_cast<int>(std::lround(parse_num(f[2], lineno)));
    r.state = AlipState(parse_num(f[3], lineno), parse_num(f[4], lineno),
                        parse_num(f[5], lineno), parse_num(f[6], lineno));
    r.x0_pred = AlipState(parse_num(f[7], lineno), parse_num(f[8], lineno),
                          parse_num(f[9], lineno), parse_num(f[10], lineno));
    r.k_x = parse_num(f[11], lineno);
    r.k_y = parse_num(f[12], lineno);
    r.mu_eff = parse_num(f[13], lineno);
    r.vx_cmd = parse_num(f[14], lineno);
    r.ufp = {parse_num(f[15], lineno), parse_num(f[16], lineno)};
    r.slip_bound_x = parse_num(f[17], lineno);
    r.slip_bound_y = parse_num(f[18], lineno);
    std::string status = f[19];
    const std::string suffix = ":fallback";
    if (status.size() > suffix.size() &&
        status.compare(status.size() - suffix.size(), suffix.size(), suffix) == 0) {
      r.fallback = true;
      status.resize(status.size() - suffix.size());
    }
    r.qp_status = status;
    r.qp_iters = static_cast<int>(std::lround(parse_num(f[20], lineno)));
    r.solve_time_s = parse_num(f[21], lineno);
    log.records.push_back(std::move(r));
  }
  return log;
}

double mean_lateral_velocity(const SimLog& log, int steps) {
  return mean_velocity(log, steps)[1];
}

double mean_forward_velocity(const SimLog& log, int steps) {
  return mean_velocity(log, steps)[0];
}

std::vector<SimLog> run_batch(std::span<const Scenario> scenarios) {
  const long n = static_cast<long>(scenarios.size());
  std::vector<SimLog> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_closed_loop(scenarios[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<SimLog> run_batch_serial(std::span<const Scenario> scenarios) {
  std::vector<SimLog> out;
  out.reserve(scenarios.size());
  for (const auto& sc : scenarios) out.push_back(run_closed_loop(sc));
  return out;
}

}  // namespace alipmpc
