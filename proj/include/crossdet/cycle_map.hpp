#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/time.hpp"

// Cycle and offset mapping between the TAS and DIP domains, plus the
// analytic end-to-end timing of a scheduled packet.

namespace crossdet {

using CycleIndex = std::int64_t;

/// The link quantities the mappings need: delay and the normalized epoch
/// offset between the link's endpoints.
struct HopParams {
  Nanos delay = 0;
  Nanos epoch_offset = 0;
};

HopParams hop_params(const NetworkGraph& graph, LinkIndex link);

/// DIP cycle in which a packet leaving a TAS edge switch at local offset `phi`
/// is retransmitted by the DIP edge router:
///   (ceil((phi + tx + d + offset) / t_dip) + r) mod n_dip.
/// Throws ModelError unless 0 <= r <= next_queues - 2 and 0 <= phi <= t_ct - tx.
CycleIndex theta_tas_to_dip(Nanos phi, Nanos tx, HopParams link, int r, int next_queues, const TimeConfig& time);

/// Latest arrival offset at a TAS edge switch of a packet sent in DIP cycle c:
///   ((c + 1) t_dip + d + offset) mod t_ct.
Nanos theta_dip_to_tas(CycleIndex c, HopParams link, const TimeConfig& time);

/// Cycle in which the downstream DIP router retransmits a packet sent in cycle c:
///   ceil(((c + 1) t_dip + d + offset) / t_dip) mod n_dip.
CycleIndex vartheta_dip_to_dip(CycleIndex c, HopParams link, const TimeConfig& time);

/// Transmission cycles (c_{k+1}, ..., c_m) of a packet whose departure offset at
/// the ingress TAS edge switch v_k is `phi_vk`.
std::vector<CycleIndex> route_cycles(const NetworkGraph& graph, const Route& route, Nanos phi_vk,
                                     std::int64_t len, int r);

/// Packet-level end-to-end delay, summed term by term from the local offsets:
/// source wait, TAS store-and-forward, alignment into the DIP ingress cycle,
/// shift, per-hop DIP alignment, extra delay and egress store-and-forward.
/// Throws ModelError when a variable the route needs is unbound.
Nanos packet_e2e_delay(const NetworkGraph& graph, const Route& route, Nanos msg_offset, std::int64_t len,
                       const PacketVars& vars);

// Global-time walk. Times below are absolute nanoseconds for the message
// instance whose arrival falls in hypercycle 0 of the source host.

/// Result of crossing the DIP segment.
struct DipLeg {
  /// Absolute local cycle numbers at v_{k+1} .. v_m (not reduced mod n_dip).
  std::vector<CycleIndex> cycles;
  /// Global start of each of those cycles.
  std::vector<Nanos> cycle_starts;
  /// Latest possible arrival at the egress TAS edge switch v_{m+1}.
  Nanos egress_arrival_bound = 0;
};

/// Walks v_{k+1} .. v_m given the global arrival time at v_{k+1}.
DipLeg walk_dip_segment(const NetworkGraph& graph, const Route& route, Nanos arrival_at_ingress_router, int r);

struct HopTiming {
  NodeIndex node = 0;
  Nanos arrival = 0;
  /// Transmission start at TAS-side nodes; start of the transmission cycle at DIP nodes.
  Nanos departure = 0;
  /// End of the transmission window: departure + tx at TAS-side nodes, cycle end at DIP nodes.
  Nanos window_end = 0;
  std::optional<CycleIndex> cycle;  ///< absolute local cycle at DIP nodes
};

struct PacketTimeline {
  Nanos message_arrival = 0;
  std::vector<HopTiming> hops;  ///< one per route node; the last is the destination
  Nanos delivery() const { return hops.back().arrival; }
  Nanos delay() const { return delivery() - message_arrival; }
};

/// Throws ModelError when a needed variable is unbound.
PacketTimeline predict_timeline(const NetworkGraph& graph, const Route& route, Nanos msg_offset,
                                std::int64_t len, const PacketVars& vars);

/// Local offset in [0, t_ct) at `node` of global time `t`.
Nanos local_offset(const NetworkGraph& graph, NodeIndex node, Nanos t);

}  // namespace crossdet
