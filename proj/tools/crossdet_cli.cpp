#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossdet/device_config.hpp"
#include "crossdet/experiments.hpp"
#include "crossdet/io.hpp"
#include "crossdet/scheduler.hpp"
#include "crossdet/simulator.hpp"
#include "crossdet/validator.hpp"

namespace fs = std::filesystem;
using namespace crossdet;

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::string schedule;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels;
  std::optional<std::string> policy;
  std::optional<std::string> solver;
  std::optional<int> horizon;
  std::optional<double> utilization;
  int apps_per_source = 2;
};

Scenario scenario_of(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.seed) {
    s.seed = *o.seed;
    s.solver.ga.seed = *o.seed;
  }
  if (o.policy) s.solver.policy = parse_policy(*o.policy);
  if (o.solver) s.solver.mode = parse_solver_mode(*o.solver);
  if (o.horizon) {
    if (*o.horizon < 1) throw ModelError("--horizon must be at least 1");
    s.simulation.horizon = *o.horizon;
  }
  if (o.utilization) {
    if (*o.utilization < 0 || *o.utilization >= 1) throw ModelError("--utilization must lie in [0, 1)");
    s.simulation.utilization = *o.utilization;
  }
  return s;
}

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> levels_or(const Options& o, std::vector<double> fallback) {
  auto v = o.levels.empty() ? std::move(fallback) : o.levels;
  if (!std::is_sorted(v.begin(), v.end())) throw ModelError("--levels must be sorted ascending");
  return v;
}

template <class Write>
void write_with(const fs::path& path, Write write) {
  std::ostringstream s;
  write(s);
  write_file(path, s.str());
}

Schedule schedule_for(const Options& o, const Scenario& s, const Workload& w) {
  if (!o.schedule.empty()) return schedule_from_json(read_file(o.schedule), s.graph, w);
  return solve(s.graph, w, s.solver);
}

// Writes the report and throws when the schedule breaks a constraint.
void check(const Schedule& schedule, const Scenario& s, const Workload& w, const fs::path& dir, bool from_solver) {
  const auto report = validate(schedule, s.graph, w);
  write_file(dir / "validation.json", report_to_json(report, s.graph, w));
  if (report.feasible()) return;
  const std::string what = std::to_string(report.violations.size()) + " violations, first: " + report.violations[0].detail;
  if (from_solver) throw InvariantError("solver returned an infeasible schedule: " + what);
  throw ModelError("schedule is infeasible: " + what);
}

std::string summary_line(const Schedule& s) {
  return "accepted " + std::to_string(s.accepted_count()) + " of " + std::to_string(s.apps.size());
}

void cmd_schedule(const Options& o) {
  const Scenario s = scenario_of(o);
  const Workload w = s.workload();
  const fs::path dir = out_dir(o);
  const Schedule schedule = solve(s.graph, w, s.solver);
  write_file(dir / "schedule.json", schedule_to_json(schedule, s.graph, w));
  check(schedule, s, w, dir, true);
  write_file(dir / "programs.json", programs_to_json(compile_all(schedule, s.graph, w), s.graph, w));
  write_file(dir / "summary.txt", summary_line(schedule) + "\n");
  std::cout << summary_line(schedule) << "\n";
}

void cmd_validate(const Options& o) {
  if (o.schedule.empty()) throw ModelError("validate needs --schedule");
  const Scenario s = scenario_of(o);
  const Workload w = s.workload();
  const fs::path dir = out_dir(o);
  const Schedule schedule = schedule_from_json(read_file(o.schedule), s.graph, w);
  check(schedule, s, w, dir, false);
  std::cout << "feasible, " << summary_line(schedule) << "\n";
}

void cmd_simulate(const Options& o) {
  const Scenario s = scenario_of(o);
  const Workload w = s.workload();
  const fs::path dir = out_dir(o);
  const Schedule schedule = schedule_for(o, s, w);
  write_file(dir / "schedule.json", schedule_to_json(schedule, s.graph, w));
  check(schedule, s, w, dir, o.schedule.empty());
  const DevicePrograms programs = compile_all(schedule, s.graph, w);
  const auto noise = uniform_interference(s.graph, interference_links(s.graph, schedule, s.simulation.scope),
                                          s.simulation.utilization, s.seed, s.simulation.flows_per_link,
                                          s.simulation.packet_bytes);
  SimOptions opt;
  opt.horizon = s.simulation.horizon;
  const SimTrace trace = run(s.graph, w, schedule, programs, noise, opt);
  write_with(dir / "trace.csv", [&](std::ostream& out) { write_trace_csv(out, trace, s.graph, w); });
  write_with(dir / "summary.csv", [&](std::ostream& out) { write_summary_csv(out, trace, w); });
  std::cout << summary_line(schedule) << ", " << trace.messages.size() << " messages delivered\n";
}

void cmd_sweep_utilization(const Options& o) {
  const Scenario s = scenario_of(o);
  const auto levels = levels_or(o, {0.2, 0.59, 0.9});
  for (double u : levels)
    if (u < 0 || u >= 1) throw ModelError("utilization levels must lie in [0, 1)");
  const fs::path dir = out_dir(o);
  const auto sweep = sweep_utilization(s, levels);
  const Workload w = s.workload();
  write_file(dir / "schedule.json", schedule_to_json(sweep.schedule, s.graph, w));
  write_with(dir / "utilization.csv", [&](std::ostream& out) {
    out << "utilization,scheduled_jitter_ns,best_effort_jitter_ns\n";
    for (const auto& p : sweep.points) out << p.utilization << ',' << p.scheduled_jitter << ',' << p.best_effort_jitter << '\n';
  });
  write_with(dir / "delays.csv", [&](std::ostream& out) {
    out << "utilization,app_id,message,scheduled_delay_ns,best_effort_delay_ns\n";
    if (!sweep.probe) return;
    const std::string& id = w.apps[*sweep.probe].app.id;
    for (const auto& p : sweep.points) {
      const auto n = std::max(p.scheduled_delays.size(), p.best_effort_delays.size());
      for (std::size_t i = 0; i < n; ++i) {
        out << p.utilization << ',' << id << ',' << i + 1 << ',';
        if (i < p.scheduled_delays.size()) out << p.scheduled_delays[i];
        out << ',';
        if (i < p.best_effort_delays.size()) out << p.best_effort_delays[i];
        out << '\n';
      }
    }
  });
  std::cout << summary_line(sweep.schedule) << "\n";
  for (const auto& p : sweep.points)
    std::cout << "utilization " << p.utilization << ": scheduled jitter " << p.scheduled_jitter
              << " ns, best-effort jitter " << p.best_effort_jitter << " ns\n";
}

void cmd_sweep_load(const Options& o) {
  const Scenario s = scenario_of(o);
  const auto levels = levels_or(o, {240, 480, 720, 960});
  std::vector<double> bps;
  for (double mbps : levels) {
    if (mbps < 0) throw ModelError("load levels must be non-negative");
    bps.push_back(mbps * 1e6);
  }
  const fs::path dir = out_dir(o);
  const auto points = sweep_load(s.graph, bps, s.load, s.solver, s.seed);
  write_with(dir / "load.csv", [&](std::ostream& out) {
    out << "load,full_ratio,no_shaping_ratio,no_route_ratio\n";
    for (std::size_t i = 0; i < points.size(); ++i)
      out << levels[i] << ',' << points[i].full << ',' << points[i].no_shaping << ',' << points[i].no_route << '\n';
  });
  for (std::size_t i = 0; i < points.size(); ++i)
    std::cout << levels[i] << " Mbps, " << points[i].apps << " apps: full " << points[i].full << ", no-shaping "
              << points[i].no_shaping << ", no-route " << points[i].no_route << "\n";
}

void cmd_generate(const Options& o) {
  if (o.apps_per_source < 0) throw ModelError("--apps must be non-negative");
  const fs::path dir = out_dir(o);
  Scenario s = backbone_scenario({}, o.apps_per_source, o.seed.value_or(1));
  write_file(dir / "scenario.json", scenario_to_json(s));
  std::cout << "wrote " << s.applications.size() << " applications on " << s.graph.node_count() << " nodes\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain deterministic scheduling and simulation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool scenario = true) {
    if (scenario) sub->add_option("--scenario", o.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--seed", o.seed, "overrides the scenario seed");
    return sub;
  };
  auto solving = [&](CLI::App* sub) {
    sub->add_option("--policy", o.policy, "full|no-shaping|no-route")
        ->check(CLI::IsMember({"full", "no-shaping", "no-route"}));
    sub->add_option("--solver", o.solver, "exhaustive|greedy|genetic")
        ->check(CLI::IsMember({"exhaustive", "greedy", "genetic"}));
    return sub;
  };

  auto* schedule = solving(common(app.add_subcommand("schedule", "solve and write schedule.json, validation.json, programs.json")));
  auto* validate_cmd = common(app.add_subcommand("validate", "check a schedule against a scenario"));
  validate_cmd->add_option("--schedule", o.schedule, "schedule JSON")->required()->check(CLI::ExistingFile);
  auto* simulate = solving(common(app.add_subcommand("simulate", "run the scheduled traffic, write trace.csv and summary.csv")));
  simulate->add_option("--schedule", o.schedule, "use this schedule instead of solving")->check(CLI::ExistingFile);
  simulate->add_option("--horizon", o.horizon, "hypercycles");
  simulate->add_option("--utilization", o.utilization, "interference level");
  auto* sweep_u = solving(common(app.add_subcommand("sweep-utilization", "jitter against interference level")));
  sweep_u->add_option("--levels", o.levels, "utilization levels")->delimiter(',');
  sweep_u->add_option("--horizon", o.horizon, "hypercycles");
  auto* sweep_l = solving(common(app.add_subcommand("sweep-load", "acceptance ratio per policy against load")));
  sweep_l->add_option("--levels", o.levels, "load per source in Mbps")->delimiter(',');
  auto* generate = common(app.add_subcommand("generate", "write the backbone scenario"), false);
  generate->add_option("--apps", o.apps_per_source, "applications per source host");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*schedule) cmd_schedule(o);
    else if (*validate_cmd) cmd_validate(o);
    else if (*simulate) cmd_simulate(o);
    else if (*sweep_u) cmd_sweep_utilization(o);
    else if (*sweep_l) cmd_sweep_load(o);
    else if (*generate) cmd_generate(o);
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
