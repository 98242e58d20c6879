#include "crossdet/schedule.hpp"

#include <algorithm>
#include <unordered_set>

namespace crossdet {

std::optional<std::string> route_structure_error(const NetworkGraph& graph, const std::vector<NodeIndex>& nodes) {
  if (nodes.size() < 2) return "route needs at least two nodes";
  for (NodeIndex n : nodes)
    if (n >= graph.node_count()) return "route references an unknown node";
  std::unordered_set<NodeIndex> seen;
  for (NodeIndex n : nodes)
    if (!seen.insert(n).second) return "route repeats node '" + graph.node(n).id + "'";
  for (std::size_t a = 0; a + 1 < nodes.size(); ++a)
    if (!graph.find_link(nodes[a], nodes[a + 1]))
      return "no link " + graph.node(nodes[a]).id + "->" + graph.node(nodes[a + 1]).id;

  const auto kind = [&](std::size_t a) { return graph.node(nodes[a]).kind; };
  const std::size_t n = nodes.size() - 1;
  if (kind(0) != NodeKind::SourceHost) return "route must start at a source host";
  if (kind(n) != NodeKind::DestHost) return "route must end at a destination host";

  std::optional<std::size_t> first_dip, last_dip;
  for (std::size_t a = 1; a < n; ++a) {
    const NodeKind k = kind(a);
    if (k == NodeKind::SourceHost || k == NodeKind::DestHost) return "host inside route";
    if (is_dip(k)) {
      if (!first_dip) first_dip = a;
      last_dip = a;
    }
  }
  if (!first_dip) return std::nullopt;  // confined to one access network

  const std::size_t f = *first_dip, m = *last_dip;
  for (std::size_t a = f; a <= m; ++a)
    if (!is_dip(kind(a))) return "DIP segment interrupted at '" + graph.node(nodes[a]).id + "'";
  if (kind(f) != NodeKind::DipEdgeRouter) return "DIP segment must be entered at a DIP edge router";
  if (kind(m) != NodeKind::DipEdgeRouter) return "DIP segment must be left at a DIP edge router";
  if (kind(f - 1) != NodeKind::TasEdgeSwitch) return "DIP segment must be entered from a TAS edge switch";
  if (m + 1 >= n || kind(m + 1) != NodeKind::TasEdgeSwitch) return "DIP segment must exit into a TAS edge switch";
  for (std::size_t a = 1; a + 1 < f; ++a)
    if (kind(a) != NodeKind::TasSwitch) return "only TAS switches may precede the ingress TAS edge switch";
  for (std::size_t a = m + 2; a < n; ++a)
    if (kind(a) != NodeKind::TasSwitch) return "only TAS switches may follow the egress TAS edge switch";
  return std::nullopt;
}

Route make_route(const NetworkGraph& graph, std::vector<NodeIndex> nodes) {
  if (auto err = route_structure_error(graph, nodes)) throw ModelError("malformed route: " + *err);
  Route r;
  for (std::size_t a = 0; a + 1 < nodes.size(); ++a) r.links.push_back(*graph.find_link(nodes[a], nodes[a + 1]));
  for (std::size_t a = 1; a + 1 < nodes.size(); ++a) {
    if (is_dip(graph.node(nodes[a]).kind)) {
      if (!r.ingress_edge) r.ingress_edge = a - 1;
      r.last_dip = a;
    }
  }
  r.nodes = std::move(nodes);
  return r;
}

Route make_route(const NetworkGraph& graph, const std::vector<std::string>& node_ids) {
  std::vector<NodeIndex> nodes;
  nodes.reserve(node_ids.size());
  for (const auto& id : node_ids) nodes.push_back(graph.node_index(id));
  return make_route(graph, std::move(nodes));
}

Schedule Schedule::empty_for(const Workload& workload) {
  Schedule s;
  s.apps.resize(workload.size());
  for (std::size_t a = 0; a < workload.size(); ++a) s.apps[a].packets.resize(workload.apps[a].packets.size());
  return s;
}

std::size_t Schedule::accepted_count() const {
  return static_cast<std::size_t>(std::count_if(apps.begin(), apps.end(), [](const auto& a) { return a.accepted; }));
}

const PacketVars& Schedule::vars(const PacketKey& key, const Workload& workload) const {
  return apps.at(key.app).packets.at(workload.apps.at(key.app).packet_slot(key.msg, key.pkt));
}

}  // namespace crossdet
