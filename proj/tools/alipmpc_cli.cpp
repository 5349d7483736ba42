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

// Command-line front end: simulate, plan, gains, sweep.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alipmpc/dare.hpp"
#include "alipmpc/errors.hpp"
#include "alipmpc/mpc.hpp"
#include "alipmpc/scenario.hpp"
#include "alipmpc/simulator.hpp"

namespace fs = std::filesystem;
using namespace alipmpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTerminal = 2;

Eigen::IOFormat kMatFmt(Eigen::FullPrecision, 0, ", ", "\n", "  [", "]");

void print_events(const SimLog& log, std::ostream& os) {
  for (const auto& e : log.events) {
    os << "  " << to_string(e.kind) << " t=" << e.t << " sample=" << e.sample
       << (e.terminal ? " terminal" : "") << ": " << e.detail << "\n";
  }
}

void write_events(const SimLog& log, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << "kind,t,sample,terminal,detail\n";
  for (const auto& e : log.events) {
    char t[40];
    std::snprintf(t, sizeof t, "%.17g", e.t);
    out << to_string(e.kind) << ',' << t << ',' << e.sample << ','
        << (e.terminal ? 1 : 0) << ",\"" << e.detail << "\"\n";
  }
}

void summarize(const std::string& label, const SimLog& log) {
  std::cout << label << ": " << log.records.size() << " samples, "
            << log.impact_count() << " steps, " << log.events.size() << " events"
            << (log.truncated ? " (truncated)" : "") << "\n";
  print_events(log, std::cout);
}

std::vector<double> parse_list(const std::string& text, std::size_t expect) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
  if (expect && v.size() != expect) {
    throw InvalidArgument("expected " + std::to_string(expect) + " comma-separated values");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALIP model-predictive foot placement simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string plant;
  int horizon = 0;
  auto* sim = app.add_subcommand("simulate", "run one closed-loop scenario");
  sim->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--plant", plant, "plant model override")->check(CLI::IsMember({"alip", "exact"}));
  sim->add_option("--horizon", horizon, "horizon override (steps)")->check(CLI::PositiveNumber);

  std::string state_text;
  double remaining = 0.0;
  auto* plan = app.add_subcommand("plan", "single MPC solve");
  plan->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--state", state_text, "x_c,y_c,L_x,L_y")->required();
  plan->add_option("--remaining", remaining, "time left in the step (s)")->required();

  auto* gains = app.add_subcommand("gains", "step-to-step map and terminal weight");
  gains->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);

  std::string horizons_text = "2,4,8";
  auto* sweep = app.add_subcommand("sweep", "horizon comparison batch");
  sweep->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--horizons", horizons_text, "comma-separated horizons");
  sweep->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    Scenario sc = load_scenario(scenario_path);

    if (*sim) {
      if (plant == "alip") sc.plant = PlantModel::kAlip;
      if (plant == "exact") sc.plant = PlantModel::kExactPre;
      if (horizon > 0) sc.controller.mpc.horizon_steps = horizon;
      sc.validate();
      const SimLog log = run_closed_loop(sc);
      fs::create_directories(out_dir);
      write_log_csv(log, fs::path(out_dir) / (sc.name + ".csv"));
      write_events(log, fs::path(out_dir) / (sc.name + "_events.csv"));
      summarize(sc.name, log);
      return log.has_terminal_event() ? kExitTerminal : kExitOk;
    }

    if (*plan) {
      const auto v = parse_list(state_text, 4);
      const AlipState x(v[0], v[1], v[2], v[3]);
      const TerrainPlane ter = sc.terrain_at(0.0);
      Planner planner(sc.controller.mpc, sc.robot);
      const auto r = planner.plan(x, remaining, sc.command_at(0.0), sc.initial_stance,
                                  ter, {}, 0);
      const FootPlan& p = r.plan;
      std::cout.precision(17);
      std::cout << "status: " << to_string(p.solution.status)
                << (r.fallback_used ? " (fallback)" : "") << "\n"
                << "iterations: " << p.solution.iterations << "\n"
                << "cost: " << p.cost << "\n"
                << "x0: " << p.x0.vec().transpose().format(kMatFmt) << "\n"
                << "u_applied: " << r.u_applied.transpose().format(kMatFmt) << "\n";
      for (std::size_t j = 0; j < p.u_sequence.size(); ++j) {
        std::cout << "u[" << j << "]: " << p.u_sequence[j].transpose().format(kMatFmt) << "\n";
      }
      for (const auto& d : p.violated) std::cout << "infeasible: " << d << "\n";
      return kExitOk;
    }

    if (*gains) {
      const TerrainPlane ter = sc.terrain_at(0.0);
      const StepMap map = step_to_step_map(sc.robot, ter);
      const DareResult dare =
          dare_terminal_cost(sc.robot, ter, sc.controller.mpc.Q_step,
                             sc.controller.mpc.terminal_mode, sc.controller.mpc.regularization);
      std::cout << "A_d:\n" << map.A_d.format(kMatFmt) << "\n"
                << "B_d:\n" << map.B_d.format(kMatFmt) << "\n"
                << "Q_f:\n" << dare.P.format(kMatFmt) << "\n";
      std::printf("dare_residual: %.3e\ndare_iterations: %d\n", dare.residual, dare.iterations);
      return kExitOk;
    }

    if (*sweep) {
      std::vector<Scenario> batch;
      for (double n : parse_list(horizons_text, 0)) {
        if (n < 1 || n != static_cast<int>(n)) throw InvalidArgument("horizons must be positive integers");
        Scenario s = sc;
        s.controller.mpc.horizon_steps = static_cast<int>(n);
        s.name = sc.name + "_h" + std::to_string(static_cast<int>(n));
        s.validate();
        batch.push_back(std::move(s));
      }
      const auto logs = run_batch(batch);
      fs::create_directories(out_dir);
      bool terminal = false;
      for (std::size_t i = 0; i < logs.size(); ++i) {
        write_log_csv(logs[i], fs::path(out_dir) / (batch[i].name + ".csv"));
        write_events(logs[i], fs::path(out_dir) / (batch[i].name + "_events.csv"));
        summarize(batch[i].name, logs[i]);
        terminal = terminal || logs[i].has_terminal_event();
      }
      return terminal ? kExitTerminal : kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
