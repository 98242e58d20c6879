#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/device_config.hpp"
#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/scheduler.hpp"
#include "crossdet/simulator.hpp"
#include "crossdet/traffic.hpp"
#include "crossdet/validator.hpp"

namespace crossdet {

/// Which links carry interference in a simulation.
enum class InterferenceScope { Routes, All };

struct SimulationSpec {
  int horizon = 100;
  double utilization = 0.0;
  int flows_per_link = 16;
  std::int64_t packet_bytes = 1500;
  InterferenceScope scope = InterferenceScope::Routes;
};

/// Shape of the applications generated for a load sweep.
struct LoadSpec {
  std::vector<Nanos> periods{500'000, 1'000'000, 2'000'000};
  std::vector<int> msg_mtus{1, 2};
  Nanos e2e = 2'000'000;
};

struct Scenario {
  NetworkGraph graph;
  std::vector<Application> applications;
  /// First-message offsets; drawn from `seed` when absent.
  std::optional<std::vector<Nanos>> first_offsets;
  std::uint64_t seed = 0;
  SolverConfig solver;
  SimulationSpec simulation;
  LoadSpec load;

  Workload workload() const;
};

/// Throws ModelError naming line and column for malformed JSON and the
/// field path for unknown fields, wrong types and bad values.
Scenario parse_scenario(std::string_view text, const std::string& origin = "scenario");
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);

std::string schedule_to_json(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);
Schedule schedule_from_json(std::string_view text, const NetworkGraph& graph, const Workload& workload);

std::string report_to_json(const ViolationReport& report, const NetworkGraph& graph, const Workload& workload);
std::string programs_to_json(const DevicePrograms& programs, const NetworkGraph& graph, const Workload& workload);

/// app_id,msg_index,pkt_index,node,arrival_ns,departure_ns
void write_trace_csv(std::ostream& out, const SimTrace& trace, const NetworkGraph& graph, const Workload& workload);
/// app_id,n_messages,min_delay_ns,max_delay_ns,jitter_ns; jitter is empty
/// for applications with fewer than two completed messages.
void write_summary_csv(std::ostream& out, const SimTrace& trace, const Workload& workload);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace crossdet
