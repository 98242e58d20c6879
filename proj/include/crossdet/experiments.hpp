#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crossdet/io.hpp"
#include "crossdet/network.hpp"
#include "crossdet/scheduler.hpp"
#include "crossdet/simulator.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

/// Fifteen-router backbone with ten single-switch access networks. Sources
/// src1..src5 hang off R1, R4, R7, R10, R13 and destinations dst1..dst5 off
/// R9, R12, R15, R3, R6.
struct BackboneOptions {
  Nanos t_ct = 2'000'000;
  Nanos t_dip = 10'000;
  std::int64_t core_bw = 10'000'000'000;
  Nanos core_delay = 150'000;
  std::int64_t access_bw = 1'000'000'000;
  Nanos access_delay = 1'500;
  /// TAS edge switch <-> DIP edge router.
  std::int64_t attach_bw = 10'000'000'000;
  Nanos attach_delay = 1'500;
  int dip_queues = 4;
  /// Random epochs per router and per access network; zero keeps all epochs at 0.
  std::uint64_t epoch_seed = 1;
};
NetworkGraph backbone_graph(const BackboneOptions& options = {});

/// Applications from every source host until each offers at least
/// `load_bps`. Periods, sizes and destinations are drawn from `seed`.
std::vector<Application> generate_load(const NetworkGraph& graph, double load_bps, const LoadSpec& spec,
                                       std::uint64_t seed);

/// Backbone scenario with `per_source` applications per source host.
Scenario backbone_scenario(const BackboneOptions& options, int per_source, std::uint64_t seed);

/// Links on the routes of accepted applications, or every link.
std::vector<LinkIndex> interference_links(const NetworkGraph& graph, const Schedule& schedule,
                                          InterferenceScope scope);

/// Routes for a best-effort run: accepted applications only, on their scheduled routes.
std::vector<std::optional<Route>> scheduled_routes(const Schedule& schedule);

struct LoadPoint {
  double load_bps = 0;
  std::size_t apps = 0;
  double full = 1.0;
  double no_shaping = 1.0;
  double no_route = 1.0;
};

/// Acceptance ratio per policy at each load; the solver mode comes from `base`.
std::vector<LoadPoint> sweep_load(const NetworkGraph& graph, const std::vector<double>& loads_bps,
                                  const LoadSpec& spec, const SolverConfig& base, std::uint64_t seed);

struct UtilizationPoint {
  double utilization = 0;
  Nanos scheduled_jitter = 0;    ///< max over accepted applications
  Nanos best_effort_jitter = 0;  ///< max over the same applications
  std::vector<Nanos> scheduled_delays;    ///< per message of the probe application
  std::vector<Nanos> best_effort_delays;  ///< per message of the probe application
};

struct UtilizationSweep {
  Schedule schedule;
  std::optional<std::size_t> probe;  ///< first accepted application
  std::vector<UtilizationPoint> points;
};

/// Schedules the scenario once, then simulates it with and without gating at
/// every interference level.
UtilizationSweep sweep_utilization(const Scenario& scenario, const std::vector<double>& levels);

}  // namespace crossdet
