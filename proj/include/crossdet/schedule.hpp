#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crossdet/network.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet {

/// A loop-free path v_0 .. v_n from a source host to a destination host.
///
/// With a DIP segment the node kinds read: source host, TAS switches, one TAS
/// edge switch (v_k), DIP edge router (v_{k+1}), DIP routers, DIP edge router
/// (v_m), TAS edge switch (v_{m+1}), TAS switches, destination host. A route
/// confined to one access network has no DIP segment and carries only TAS
/// switches between the hosts.
struct Route {
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;
  std::optional<std::size_t> ingress_edge;  ///< k
  std::optional<std::size_t> last_dip;      ///< m

  bool has_dip_segment() const { return ingress_edge.has_value(); }
  std::size_t hop_count() const { return links.size(); }

  friend bool operator==(const Route&, const Route&) = default;
};

/// Why `nodes` is not a well-formed route, or nullopt when it is.
std::optional<std::string> route_structure_error(const NetworkGraph& graph, const std::vector<NodeIndex>& nodes);
/// Throws ModelError on a malformed route.
Route make_route(const NetworkGraph& graph, std::vector<NodeIndex> nodes);
Route make_route(const NetworkGraph& graph, const std::vector<std::string>& node_ids);

/// Per-packet decision variables. Unset means unbound.
struct PacketVars {
  std::optional<Nanos> src_offset;  ///< departure offset at the source host
  std::optional<int> cycle_shift;   ///< r at the DIP edge ingress
  std::optional<Nanos> extra_delay; ///< phi at the egress TAS edge switch

  friend bool operator==(const PacketVars&, const PacketVars&) = default;
};

struct AppAssignment {
  bool accepted = false;
  std::optional<Route> route;
  std::vector<PacketVars> packets;  ///< aligned with AppTraffic::packets

  friend bool operator==(const AppAssignment&, const AppAssignment&) = default;
};

/// Admission, routes, source offsets, cycle shifts and extra delays.
struct Schedule {
  std::vector<AppAssignment> apps;
  /// Set when a solver ran out of its time budget and returned its best feasible result.
  bool budget_exhausted = false;

  static Schedule empty_for(const Workload& workload);
  std::size_t accepted_count() const;
  const PacketVars& vars(const PacketKey& key, const Workload& workload) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

}  // namespace crossdet
