#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossdet/cycle_map.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

enum class ViolationKind { Conflict, Capacity, Deadline, Domain };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::Domain;
  std::vector<PacketKey> packets;
  std::vector<std::size_t> apps;
  std::optional<LinkIndex> link;
  std::optional<CycleIndex> cycle;
  /// Overlap in ns (Conflict), excess bytes (Capacity), deadline miss in ns
  /// (Deadline), distance outside the allowed range (Domain, 0 when unbound).
  std::int64_t slack = 0;
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

/// Predicted timelines of every accepted packet whose variables are in range,
/// plus the Domain violations found while building them.
struct ScheduleAnalysis {
  std::map<PacketKey, PacketTimeline> timelines;
  std::vector<Violation> domain;
};

ScheduleAnalysis analyze(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);

/// Packets sharing a TAS-side egress link must not overlap in the cycle-time frame.
std::vector<Violation> check_conflicts(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);
/// Bytes per (DIP-sourced link, cycle) must fit t_dip * bw.
std::vector<Violation> check_capacity(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);
/// Max packet delay per accepted application must not exceed its deadline.
std::vector<Violation> check_deadlines(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);

std::vector<Violation> check_conflicts(const ScheduleAnalysis& analysis, const NetworkGraph& graph,
                                       const Workload& workload);
std::vector<Violation> check_capacity(const ScheduleAnalysis& analysis, const NetworkGraph& graph,
                                      const Workload& workload);
std::vector<Violation> check_deadlines(const ScheduleAnalysis& analysis, const Schedule& schedule,
                                       const Workload& workload);

/// All constraints of the admission problem. Empty iff the schedule is feasible.
ViolationReport validate(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);

/// Application-level delay: max over the application's packet delays.
std::optional<Nanos> application_delay(const ScheduleAnalysis& analysis, std::size_t app);

}  // namespace crossdet
