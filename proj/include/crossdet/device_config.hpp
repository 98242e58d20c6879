#pragma once

#include <string>
#include <vector>

#include "crossdet/cycle_map.hpp"
#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

/// Queue 1 carries best-effort traffic; 2..8 are deterministic.
inline constexpr int kBestEffortQueue = 1;

/// Gate states as 8 characters, leftmost Q1 and rightmost Q8: "ccccccco" opens Q8.
std::string gate_string(int open_queue);

struct GateControlEntry {
  Nanos offset = 0;
  /// Gates close again after this long (the packet's transmission time).
  Nanos duration = 0;
  std::string gate_states;
  int queue = 8;
  PacketKey packet;
};

struct GateControlList {
  std::string node;
  LinkIndex port = 0;
  Nanos cycle = 0;
  std::vector<GateControlEntry> entries;  ///< sorted by offset
};

/// A core hop: cycle of the upstream sender -> local transmission cycle.
struct CycleMapping {
  LinkIndex in_link = 0;
  std::vector<CycleIndex> next;  ///< indexed by upstream cycle, size n_dip
};

/// A packet entering the DIP domain at this edge router.
struct IngressEntry {
  PacketKey packet;
  LinkIndex in_link = 0;
  LinkIndex out_link = 0;
  CycleIndex arrival_cycle = 0;  ///< cycle in progress when the packet arrives, mod n_dip
  int shift = 0;
  CycleIndex out_cycle = 0;      ///< mod n_dip
  int queue_advance = 1;         ///< queues ahead of the open one, shift + 1
};

struct DipCycleTable {
  std::string node;
  std::vector<CycleMapping> core;
  std::vector<IngressEntry> ingress;
};

struct PifoEntry {
  PacketKey packet;
  LinkIndex port = 0;
  Nanos arrival_bound = 0;  ///< θ of the DIP cycle the packet left in
  Nanos extra_delay = 0;
  Nanos rank = 0;           ///< local departure offset
};

struct PifoProgram {
  std::string node;
  std::vector<PifoEntry> entries;  ///< sorted by (port, rank)
};

struct DevicePrograms {
  std::vector<GateControlList> gcls;
  std::vector<DipCycleTable> dip_tables;
  std::vector<PifoProgram> pifos;
};

/// One list per egress port of a TAS-side node. Queues are handed out
/// round-robin from the highest deterministic queue down, in offset order.
/// Throws ModelError when the schedule is infeasible or a queue would have
/// to release packets out of arrival order.
std::vector<GateControlList> compile_gcl(const Schedule& schedule, const NetworkGraph& graph,
                                         const Workload& workload, NodeIndex node);
DipCycleTable compile_dip_table(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload,
                                NodeIndex node);
PifoProgram compile_pifo(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload,
                         NodeIndex node);
DevicePrograms compile_all(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload);

}  // namespace crossdet
