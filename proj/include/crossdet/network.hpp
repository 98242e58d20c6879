#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crossdet/time.hpp"

namespace crossdet {

enum class NodeKind { SourceHost, DestHost, TasSwitch, TasEdgeSwitch, DipRouter, DipEdgeRouter };

std::string_view to_string(NodeKind kind);
/// Accepts the enumerator names ("SourceHost", ...) and snake_case aliases.
NodeKind parse_node_kind(std::string_view text);

/// Nodes whose egress links are governed by the TAS conflict constraint.
constexpr bool is_tas_side(NodeKind k) {
  return k == NodeKind::SourceHost || k == NodeKind::TasSwitch || k == NodeKind::TasEdgeSwitch;
}
constexpr bool is_dip(NodeKind k) { return k == NodeKind::DipRouter || k == NodeKind::DipEdgeRouter; }
constexpr bool is_tas_switch(NodeKind k) { return k == NodeKind::TasSwitch || k == NodeKind::TasEdgeSwitch; }

struct Node {
  std::string id;
  NodeKind kind = NodeKind::TasSwitch;
  /// Start of this node's cycle time / hypercycle relative to global time zero, in [0, t_hc).
  Nanos epoch = 0;
};

struct Link {
  std::string src;
  std::string dst;
  std::int64_t bw_bps = 0;
  /// Propagation plus processing delay.
  Nanos delay = 0;
  /// Deterministic egress queues at src.
  int queues = 8;
};

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

/// Directed topology with timing configuration. Immutable after construction.
class NetworkGraph {
 public:
  NetworkGraph(std::vector<Node> nodes, std::vector<Link> links, TimeConfig time);

  const TimeConfig& time() const { return time_; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }

  const Node& node(NodeIndex n) const { return nodes_.at(n); }
  const Link& link(LinkIndex l) const { return links_.at(l); }
  NodeIndex link_src(LinkIndex l) const { return link_src_.at(l); }
  NodeIndex link_dst(LinkIndex l) const { return link_dst_.at(l); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  /// Throws ModelError for unknown ids.
  NodeIndex node_index(std::string_view id) const;
  std::optional<LinkIndex> find_link(NodeIndex src, NodeIndex dst) const;
  std::span<const LinkIndex> out_links(NodeIndex n) const { return out_.at(n); }

  /// (epoch(src) - epoch(dst)) mod t_hc, precomputed.
  Nanos epoch_offset(LinkIndex l) const { return offsets_.at(l); }
  Nanos tx_time(LinkIndex l, std::int64_t bytes) const;

  std::vector<NodeIndex> nodes_of_kind(NodeKind kind) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  TimeConfig time_;
  std::vector<NodeIndex> link_src_;
  std::vector<NodeIndex> link_dst_;
  std::vector<Nanos> offsets_;
  std::vector<std::vector<LinkIndex>> out_;
  std::unordered_map<std::string, NodeIndex> by_id_;
  std::unordered_map<std::uint64_t, LinkIndex> by_pair_;
};

NetworkGraph build_graph(std::vector<Node> nodes, std::vector<Link> links, TimeConfig time);

Nanos epoch_offset(const NetworkGraph& graph, LinkIndex link);

}  // namespace crossdet
