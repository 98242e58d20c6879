#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

enum class SolverMode { Exhaustive, Greedy, Genetic };
/// Full: shaping and route selection. NoShaping: every packet leaves as soon
/// as its message exists, r = 0, extra delay 0. NoRouteSelection: shortest
/// candidate route only.
enum class Policy { Full, NoShaping, NoRouteSelection };

std::string_view to_string(SolverMode mode);
SolverMode parse_solver_mode(std::string_view text);
std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view text);

struct GeneticParams {
  int population = 40;
  int generations = 60;
  double mutation_rate = 0.1;
  double crossover_rate = 0.8;
  std::uint64_t seed = 1;
};

struct SolverConfig {
  SolverMode mode = SolverMode::Greedy;
  Policy policy = Policy::Full;
  Nanos offset_granularity = 0;  ///< 0 selects t_dip
  int k_routes = 3;
  GeneticParams ga;
  double time_budget_s = 60.0;
  /// Exhaustive mode refuses larger instances.
  std::size_t exhaustive_max_apps = 8;
  double exhaustive_max_log10_space = 30.0;
  /// Extra starting points for the genetic search.
  std::vector<Schedule> initial;
};

/// Throws ModelError unless the granularity divides t_dip and k_routes >= 1.
void check_config(const SolverConfig& config, const TimeConfig& time);
Nanos effective_granularity(const SolverConfig& config, const TimeConfig& time);

/// Raised by exhaustive mode when the option space exceeds the configured limit.
class SearchSpaceTooLarge : public ModelError {
 public:
  SearchSpaceTooLarge(double log10_size, std::size_t apps);
  double log10_size() const { return log10_size_; }

 private:
  double log10_size_;
};

/// Up to k loop-free conforming paths, ordered by hop count, total link
/// delay, then node ids. Empty when none exists.
std::vector<Route> enumerate_routes(const NetworkGraph& graph, NodeIndex src, NodeIndex dest, int k);

/// Candidate routes per application (aligned with the workload).
using CandidateRoutes = std::vector<std::vector<Route>>;
CandidateRoutes candidate_routes(const NetworkGraph& graph, const Workload& workload, int k);

/// Dispatches on config.policy and config.mode.
Schedule solve(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config);

Schedule solve_greedy(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config);
Schedule solve_exhaustive(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config);
Schedule solve_genetic(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config);
/// Admission under immediate forwarding; see Policy::NoShaping.
Schedule solve_no_shaping(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config);

}  // namespace crossdet
