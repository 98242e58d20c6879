#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "crossdet/device_config.hpp"
#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

/// Constant-bit-rate best-effort flow crossing a single link.
struct InterferenceFlow {
  LinkIndex link = 0;
  std::int64_t rate_bps = 0;
  std::int64_t packet_bytes = 1500;
  Nanos phase = 0;  ///< first injection, global time
};

struct InterferenceProfile {
  std::vector<InterferenceFlow> flows;
};

/// `flows_per_link` flows on each listed link whose rates add up to
/// utilization * bw. Each flow gets a random share of that rate (between 0.5
/// and 1.5 of an equal split) and a random phase, drawn from `seed`.
InterferenceProfile uniform_interference(const NetworkGraph& graph, const std::vector<LinkIndex>& links,
                                         double utilization, std::uint64_t seed, int flows_per_link = 16,
                                         std::int64_t packet_bytes = 1500);

struct SimOptions {
  int horizon = 1;                         ///< hypercycles of application traffic
  std::size_t best_effort_capacity = 256;  ///< packets per port, drop-tail
};

struct HopRecord {
  std::size_t app = 0;
  std::int64_t msg_index = 1;  ///< h * messages_per_cycle + i
  int pkt = 1;
  NodeIndex node = 0;
  Nanos arrival = 0;
  Nanos departure = 0;  ///< equals arrival at the destination
  friend bool operator==(const HopRecord&, const HopRecord&) = default;
};

struct MessageRecord {
  std::size_t app = 0;
  std::int64_t msg_index = 1;
  Nanos arrival = 0;
  std::optional<Nanos> completion;  ///< unset when a packet was dropped
  std::optional<Nanos> delay() const {
    if (!completion) return std::nullopt;
    return *completion - arrival;
  }
  friend bool operator==(const MessageRecord&, const MessageRecord&) = default;
};

struct SimTrace {
  std::vector<HopRecord> hops;          ///< sorted by (app, msg, pkt, arrival)
  std::vector<MessageRecord> messages;  ///< sorted by (app, msg)
  std::size_t app_drops = 0;
  std::size_t interference_sent = 0;
  std::size_t interference_drops = 0;
  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Executes the device programs compiled from `schedule` for every accepted
/// application, with interference in the best-effort queue of each port.
/// Throws InvariantError when a scheduled packet misses its gate, overruns its
/// cycle or is never delivered.
SimTrace run(const NetworkGraph& graph, const Workload& workload, const Schedule& schedule,
             const DevicePrograms& programs, const InterferenceProfile& interference, const SimOptions& options);

/// Same traffic over plain FIFO ports: no gates, no cycles. Applications
/// without a route are not sent.
SimTrace run_best_effort(const NetworkGraph& graph, const Workload& workload,
                         const std::vector<std::optional<Route>>& routes, const InterferenceProfile& interference,
                         const SimOptions& options);

/// Delays of the completed messages of `app`, in message order.
std::vector<Nanos> message_delays(const SimTrace& trace, std::size_t app);

/// max - min of the completed message delays. Throws ModelError with fewer than two.
Nanos measure_jitter(const SimTrace& trace, std::size_t app);
Nanos measure_jitter(const std::vector<Nanos>& delays);

}  // namespace crossdet
