#include "crossdet/network.hpp"

#include <array>
#include <utility>

namespace crossdet {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 6> kKindNames{{
    {NodeKind::SourceHost, "SourceHost"},
    {NodeKind::DestHost, "DestHost"},
    {NodeKind::TasSwitch, "TasSwitch"},
    {NodeKind::TasEdgeSwitch, "TasEdgeSwitch"},
    {NodeKind::DipRouter, "DipRouter"},
    {NodeKind::DipEdgeRouter, "DipEdgeRouter"},
}};

constexpr std::array<std::pair<NodeKind, std::string_view>, 6> kKindAliases{{
    {NodeKind::SourceHost, "source_host"},
    {NodeKind::DestHost, "dest_host"},
    {NodeKind::TasSwitch, "tas_switch"},
    {NodeKind::TasEdgeSwitch, "tas_edge_switch"},
    {NodeKind::DipRouter, "dip_router"},
    {NodeKind::DipEdgeRouter, "dip_edge_router"},
}};

std::uint64_t pair_key(NodeIndex a, NodeIndex b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

}  // namespace

std::string_view to_string(NodeKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "?";
}

NodeKind parse_node_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames)
    if (name == text) return k;
  for (const auto& [k, name] : kKindAliases)
    if (name == text) return k;
  throw ModelError("unknown node kind '" + std::string(text) + "'");
}

NetworkGraph::NetworkGraph(std::vector<Node> nodes, std::vector<Link> links, TimeConfig time)
    : nodes_(std::move(nodes)), links_(std::move(links)), time_(time) {
  out_.resize(nodes_.size());
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.id.empty()) throw ModelError("node with empty id");
    if (!by_id_.emplace(n.id, i).second) throw ModelError("duplicate node id '" + n.id + "'");
    if (n.epoch < 0 || n.epoch >= time_.t_hc())
      throw ModelError("node '" + n.id + "': epoch " + std::to_string(n.epoch) + " outside [0, t_hc)");
  }
  for (LinkIndex l = 0; l < links_.size(); ++l) {
    const Link& link = links_[l];
    const auto s = find_node(link.src);
    const auto d = find_node(link.dst);
    if (!s) throw ModelError("link " + link.src + "->" + link.dst + ": dangling endpoint '" + link.src + "'");
    if (!d) throw ModelError("link " + link.src + "->" + link.dst + ": dangling endpoint '" + link.dst + "'");
    if (*s == *d) throw ModelError("link " + link.src + "->" + link.dst + ": self loop");
    if (link.bw_bps <= 0) throw ModelError("link " + link.src + "->" + link.dst + ": bandwidth must be positive");
    if (link.delay < 0) throw ModelError("link " + link.src + "->" + link.dst + ": negative delay");
    if (link.queues < 1) throw ModelError("link " + link.src + "->" + link.dst + ": queue count must be positive");
    if (is_dip(nodes_[*s].kind) && link.queues < 2)
      throw ModelError("link " + link.src + "->" + link.dst + ": DIP-sourced link needs at least 2 queues");
    if (!by_pair_.emplace(pair_key(*s, *d), l).second)
      throw ModelError("duplicate link " + link.src + "->" + link.dst);
    link_src_.push_back(*s);
    link_dst_.push_back(*d);
    offsets_.push_back(mod_floor(nodes_[*s].epoch - nodes_[*d].epoch, time_.t_hc()));
    out_[*s].push_back(l);
  }
}

std::optional<NodeIndex> NetworkGraph::find_node(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

NodeIndex NetworkGraph::node_index(std::string_view id) const {
  if (auto n = find_node(id)) return *n;
  throw ModelError("unknown node '" + std::string(id) + "'");
}

std::optional<LinkIndex> NetworkGraph::find_link(NodeIndex src, NodeIndex dst) const {
  const auto it = by_pair_.find(pair_key(src, dst));
  if (it == by_pair_.end()) return std::nullopt;
  return it->second;
}

Nanos NetworkGraph::tx_time(LinkIndex l, std::int64_t bytes) const {
  return transmission_time(bytes, links_.at(l).bw_bps);
}

std::vector<NodeIndex> NetworkGraph::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == kind) out.push_back(i);
  return out;
}

NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Link> links, TimeConfig time) {
  return NetworkGraph(std::move(nodes), std::move(links), time);
}

Nanos epoch_offset(const NetworkGraph& graph, LinkIndex link) { return graph.epoch_offset(link); }

}  // namespace crossdet
