// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crossdet/cycle_map.hpp"
#include "crossdet/device_config.hpp"
#include "crossdet/experiments.hpp"
#include "crossdet/scheduler.hpp"
#include "crossdet/simulator.hpp"
#include "crossdet/validator.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"
#include "support/sim_check.hpp"

using namespace crossdet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f s", s);
  return buf;
}

Outcome exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t scenarios = 0, packets = 0, mismatches = 0, max_nodes = 0;
  std::string first;
  auto check = [&](const NetworkGraph& g, const Workload& w, const SolverConfig& c, std::uint64_t seed, int horizon) {
    const Schedule s = solve(g, w, c);
    if (!validate(s, g, w).feasible() || s.accepted_count() == 0) return;
    const auto links = interference_links(g, s, InterferenceScope::All);
    SimOptions opt;
    opt.horizon = horizon;
    const SimTrace t = run(g, w, s, compile_all(s, g, w), uniform_interference(g, links, 0.5, seed), opt);
    const auto r = testing::compare_with_model(t, s, g, w);
    ++scenarios;
    packets += r.packets;
    mismatches += r.mismatches;
    max_nodes = std::max(max_nodes, g.node_count());
    if (first.empty() && r.mismatches) first = r.first;
  };
  for (std::uint64_t seed = 1; scenarios < 40 && seed <= 80; ++seed) {
    auto inst = testing::medium_instance(seed, static_cast<int>(5 + seed % 16));
    check(inst.graph, inst.workload, SolverConfig{}, seed, 3);
  }
  for (std::uint64_t seed = 1; scenarios < 50 && seed <= 20; ++seed) {
    BackboneOptions o;
    o.epoch_seed = seed;
    const Scenario sc = backbone_scenario(o, 4, seed);
    check(sc.graph, sc.workload(), SolverConfig{}, seed, 2);
  }
  const double took = seconds_since(t0);
  std::ostringstream d;
  d << scenarios << " scenarios (up to " << max_nodes << " nodes), " << packets << " packets, " << mismatches
    << " mismatches, " << fmt_s(took);
  if (!first.empty()) d << "; first: " << first;
  return {scenarios >= 50 && packets > 0 && mismatches == 0 && took < 120, d.str()};
}

struct Backbone {
  UtilizationSweep sweep;
  std::string error;
};

Backbone backbone_sweep() {
  Backbone b;
  try {
    Scenario sc = backbone_scenario({}, 2, 1);
    sc.simulation.horizon = 100;
    b.sweep = sweep_utilization(sc, {0.2, 0.59, 0.9});
  } catch (const std::exception& e) {
    b.error = e.what();
  }
  return b;
}

Outcome zero_jitter(const Backbone& b) {
  if (!b.error.empty()) return {false, b.error};
  const auto& p = b.sweep.points;
  std::ostringstream d;
  bool pass = b.sweep.schedule.accepted_count() > 0 && p.size() == 3;
  d << b.sweep.schedule.accepted_count() << " of " << b.sweep.schedule.apps.size() << " accepted;";
  for (const auto& x : p) {
    d << " u=" << x.utilization << " scheduled " << x.scheduled_jitter << " ns, best-effort " << x.best_effort_jitter
      << " ns;";
    pass = pass && x.scheduled_jitter == 0 && x.scheduled_delays.size() == 100;
  }
  pass = pass && p[1].best_effort_jitter > 0 && p[0].best_effort_jitter <= p[1].best_effort_jitter &&
         p[1].best_effort_jitter <= p[2].best_effort_jitter;
  return {pass, d.str()};
}

Outcome delay_ordering(const Backbone& b) {
  if (!b.error.empty()) return {false, b.error};
  if (!b.sweep.probe || b.sweep.points.size() < 2) return {false, "nothing scheduled"};
  const auto& p = b.sweep.points[1];
  if (p.scheduled_delays.empty() || p.best_effort_delays.empty()) return {false, "no delays recorded"};
  const auto [lo, hi] = std::minmax_element(p.best_effort_delays.begin(), p.best_effort_delays.end());
  const Nanos d = p.scheduled_delays.front();
  std::ostringstream s;
  s << "scheduled " << d << " ns, best-effort " << *lo << " .. " << *hi << " ns at u=0.59";
  return {*lo < d && d < *hi, s.str()};
}

Outcome soundness() {
  // Exhaustive runs on the tiny instances only; it refuses larger search spaces.
  std::size_t total = 0, bad = 0, instances = 0;
  auto run_modes = [&](const NetworkGraph& g, const Workload& w, std::uint64_t seed, bool exhaustive) {
    ++instances;
    for (auto mode : {SolverMode::Exhaustive, SolverMode::Greedy, SolverMode::Genetic}) {
      if (mode == SolverMode::Exhaustive && !exhaustive) continue;
      SolverConfig c;
      c.mode = mode;
      c.ga.seed = seed;
      c.ga.population = 16;
      c.ga.generations = 20;
      ++total;
      if (!validate(solve(g, w, c), g, w).feasible()) ++bad;
    }
  };
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto tiny = testing::tiny_instance(seed);
    run_modes(tiny.graph, tiny.workload, seed, true);
    auto medium = testing::medium_instance(seed + 1000, 4);
    run_modes(medium.graph, medium.workload, seed, false);
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto medium = testing::medium_instance(seed + 2000, 16);
    run_modes(medium.graph, medium.workload, seed, false);
  }
  std::ostringstream d;
  d << instances << " instances, " << total << " schedules, " << bad << " with violations";
  return {instances >= 100 && bad == 0, d.str()};
}

Outcome optimality() {
  int exact = 0, genetic = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto inst = testing::tiny_instance(seed);
    const int oracle = testing::brute_force_max_accepted(inst.graph, inst.workload).best;
    SolverConfig c;
    c.mode = SolverMode::Exhaustive;
    if (static_cast<int>(solve(inst.graph, inst.workload, c).accepted_count()) == oracle) ++exact;
    c.mode = SolverMode::Genetic;
    c.ga.seed = seed;
    c.ga.population = 16;
    c.ga.generations = 30;
    if (static_cast<int>(solve(inst.graph, inst.workload, c).accepted_count()) == oracle) ++genetic;
  }
  std::ostringstream d;
  d << "exhaustive " << exact << "/20, genetic " << genetic << "/20 against brute force";
  return {exact == 20 && genetic >= 18, d.str()};
}

Outcome shaping_benefit() {
  const std::vector<double> loads{240e6, 480e6, 720e6, 960e6};
  const auto pts = sweep_load(backbone_graph(), loads, LoadSpec{}, SolverConfig{}, 1);
  bool pass = true, strict = false;
  std::ostringstream d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d << static_cast<int>(pts[i].load_bps / 1e6) << " Mbps full " << pts[i].full << " no-shaping "
      << pts[i].no_shaping << " no-route " << pts[i].no_route << "; ";
    pass = pass && pts[i].full >= pts[i].no_shaping;
    if (i < 3 && pts[i].full > pts[i].no_shaping) strict = true;
  }
  return {pass && strict, d.str()};
}

Outcome isolation() {
  std::size_t cases = 0, differing = 0, rows = 0;
  auto compare = [&](const NetworkGraph& g, const Workload& w, std::uint64_t seed, int horizon) {
    const Schedule s = solve(g, w, SolverConfig{});
    if (s.accepted_count() == 0) return;
    const DevicePrograms p = compile_all(s, g, w);
    SimOptions opt;
    opt.horizon = horizon;
    const auto quiet = testing::scheduled_rows(run(g, w, s, p, {}, opt), s);
    rows += quiet.size();
    for (auto scope : {InterferenceScope::Routes, InterferenceScope::All})
      for (double u : {0.3, 0.9}) {
        const auto noise = uniform_interference(g, interference_links(g, s, scope), u, seed);
        ++cases;
        if (testing::scheduled_rows(run(g, w, s, p, noise, opt), s) != quiet) ++differing;
      }
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = testing::medium_instance(seed + 3000, 12);
    compare(inst.graph, inst.workload, seed, 3);
  }
  const Scenario sc = backbone_scenario({}, 2, 5);
  compare(sc.graph, sc.workload(), 5, 3);
  std::ostringstream d;
  d << cases << " noisy runs over " << rows << " scheduled rows, " << differing << " differ from the quiet run";
  return {cases > 0 && rows > 0 && differing == 0, d.str()};
}

// First cycle k (global numbering) whose start k*T is at or after t, by scanning.
CycleIndex first_cycle_at_or_after(Nanos t, Nanos T) {
  CycleIndex k = 0;
  while (k * T < t) ++k;
  return k;
}

Outcome mapping_suite() {
  std::size_t checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failures;
  };
  const Nanos T = 1'000;
  for (CycleIndex n = 1; n <= 16; ++n) {
    const TimeConfig time(n * T, T);
    for (Nanos d : {Nanos{0}, Nanos{1}, T - 1, T, 2 * T + 500, 17 * T + 3})
      for (Nanos off : {Nanos{0}, Nanos{1}, T / 2, T, time.t_ct() - 1}) {
        if (off >= time.t_ct()) continue;
        const HopParams hp{d, off};
        for (CycleIndex c = 0; c < n; ++c) {
          const Nanos arrive_global = (c + 1) * T + d + off;
          const Nanos arrive = theta_dip_to_tas(c, hp, time);
          expect(arrive >= 0 && arrive < time.t_ct());
          expect(arrive == arrive_global % time.t_ct());
          const CycleIndex next = vartheta_dip_to_dip(c, hp, time);
          expect(next >= 0 && next < n);
          expect(next == first_cycle_at_or_after(arrive_global, T) % n);
          expect(next == first_cycle_at_or_after(arrive, T) % n);
          expect(vartheta_dip_to_dip((c + 1) % n, hp, time) == (next + 1) % n);
        }
        for (Nanos tx : {Nanos{1}, T / 4, T}) {
          if (tx > time.t_ct()) continue;
          for (Nanos phi = 0; phi <= time.t_ct() - tx; phi += std::max<Nanos>(1, time.t_ct() / 37)) {
            for (int q = 2; q <= 8; ++q) {
              const CycleIndex base = first_cycle_at_or_after(phi + tx + d + off, T);
              CycleIndex prev = -1;
              for (int r = 0; r <= q - 2; ++r) {
                const CycleIndex c = theta_tas_to_dip(phi, tx, hp, r, q, time);
                expect(c >= 0 && c < n);
                expect(c == (base + r) % n);
                if (r > 0) expect(c == (prev + 1) % n);
                prev = c;
              }
              bool threw = false;
              try {
                theta_tas_to_dip(phi, tx, hp, q - 1, q, time);
              } catch (const ModelError&) {
                threw = true;
              }
              expect(threw);
            }
          }
        }
      }
  }
  std::ostringstream s;
  s << checks << " checks over n_dip 1..16, " << failures << " failed";
  return {failures == 0, s.str()};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << std::endl;
    if (!o.pass) ++failed;
  };
  report(1, "analytic-simulation exactness", guarded(exactness));
  const Backbone b = backbone_sweep();
  report(2, "zero scheduled jitter", guarded([&] { return zero_jitter(b); }));
  report(3, "delay ordering", guarded([&] { return delay_ordering(b); }));
  report(4, "solver soundness", guarded(soundness));
  report(5, "small-instance optimality", guarded(optimality));
  report(6, "shaping benefit", guarded(shaping_benefit));
  report(7, "isolation", guarded(isolation));
  report(8, "mapping functions", guarded(mapping_suite));
  return failed == 0 ? 0 : 1;
}
