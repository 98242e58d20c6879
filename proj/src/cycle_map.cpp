#include "crossdet/cycle_map.hpp"

#include <string>

namespace crossdet {

namespace {

void check_cycle(CycleIndex c, const TimeConfig& time) {
  if (c < 0 || c >= time.n_dip())
    throw ModelError("cycle index " + std::to_string(c) + " outside [0, " + std::to_string(time.n_dip()) + ")");
}

std::size_t ingress(const Route& route) {
  if (!route.ingress_edge) throw ModelError("route has no DIP segment");
  return *route.ingress_edge;
}

}  // namespace

HopParams hop_params(const NetworkGraph& graph, LinkIndex link) {
  return {graph.link(link).delay, graph.epoch_offset(link)};
}

CycleIndex theta_tas_to_dip(Nanos phi, Nanos tx, HopParams link, int r, int next_queues, const TimeConfig& time) {
  if (r < 0 || r > next_queues - 2)
    throw ModelError("cycle shift " + std::to_string(r) + " outside [0, " + std::to_string(next_queues - 2) + "]");
  if (phi < 0 || phi > time.t_ct() - tx)
    throw ModelError("offset " + std::to_string(phi) + " ns outside [0, t_ct - tx]");
  const Nanos t = time.t_dip();
  return mod_floor(ceil_div(phi + tx + link.delay + link.epoch_offset, t) + r, time.n_dip());
}

Nanos theta_dip_to_tas(CycleIndex c, HopParams link, const TimeConfig& time) {
  check_cycle(c, time);
  return mod_floor((c + 1) * time.t_dip() + link.delay + link.epoch_offset, time.t_ct());
}

CycleIndex vartheta_dip_to_dip(CycleIndex c, HopParams link, const TimeConfig& time) {
  check_cycle(c, time);
  const Nanos t = time.t_dip();
  return mod_floor(ceil_div((c + 1) * t + link.delay + link.epoch_offset, t), time.n_dip());
}

std::vector<CycleIndex> route_cycles(const NetworkGraph& graph, const Route& route, Nanos phi_vk,
                                     std::int64_t len, int r) {
  const std::size_t k = ingress(route);
  const std::size_t m = *route.last_dip;
  const TimeConfig& time = graph.time();
  const LinkIndex lk = route.links[k];
  std::vector<CycleIndex> cycles;
  cycles.push_back(theta_tas_to_dip(phi_vk, graph.tx_time(lk, len), hop_params(graph, lk), r,
                                    graph.link(route.links[k + 1]).queues, time));
  for (std::size_t a = k + 1; a < m; ++a)
    cycles.push_back(vartheta_dip_to_dip(cycles.back(), hop_params(graph, route.links[a]), time));
  return cycles;
}

Nanos packet_e2e_delay(const NetworkGraph& graph, const Route& route, Nanos msg_offset, std::int64_t len,
                       const PacketVars& vars) {
  if (!vars.src_offset) throw ModelError("unbound source offset");
  const TimeConfig& time = graph.time();
  const Nanos t_ct = time.t_ct();
  const Nanos t_dip = time.t_dip();
  const auto tx = [&](std::size_t a) { return graph.tx_time(route.links[a], len); };
  const auto d = [&](std::size_t a) { return graph.link(route.links[a]).delay; };
  const auto off = [&](std::size_t a) { return graph.epoch_offset(route.links[a]); };

  Nanos delay = mod_floor(*vars.src_offset - msg_offset, t_ct);
  if (!route.has_dip_segment()) {
    for (std::size_t a = 0; a < route.links.size(); ++a) delay += tx(a) + d(a);
    return delay;
  }
  if (!vars.cycle_shift) throw ModelError("unbound cycle shift");
  if (!vars.extra_delay) throw ModelError("unbound extra delay");
  const std::size_t k = *route.ingress_edge;
  const std::size_t m = *route.last_dip;
  const std::size_t n = route.links.size();
  const int r = *vars.cycle_shift;

  // Source to the ingress TAS edge switch; phi tracks the local offset.
  Nanos phi = *vars.src_offset;
  for (std::size_t a = 0; a < k; ++a) {
    delay += tx(a) + d(a);
    phi = mod_floor(phi + tx(a) + d(a) + off(a), t_ct);
  }
  // Alignment into the first DIP cycle, the shift, and the end of the shifted cycle.
  delay += ceil_div(phi + tx(k) + d(k) + off(k), t_dip) * t_dip - phi - off(k);
  delay += (r + 1) * t_dip + d(k + 1);
  // Per-hop DIP alignment.
  const std::vector<CycleIndex> cycles = route_cycles(graph, route, phi, len, r);
  for (std::size_t a = k + 1; a < m; ++a) {
    const CycleIndex c = cycles[a - (k + 1)];
    delay += ceil_div((c + 1) * t_dip + d(a) + off(a), t_dip) * t_dip - c * t_dip - d(a) - off(a) + d(a + 1);
  }
  delay += *vars.extra_delay;
  for (std::size_t a = m + 1; a < n; ++a) delay += tx(a) + d(a);
  return delay;
}

DipLeg walk_dip_segment(const NetworkGraph& graph, const Route& route, Nanos arrival_at_ingress_router, int r) {
  const std::size_t k = ingress(route);
  const std::size_t m = *route.last_dip;
  const Nanos t_dip = graph.time().t_dip();
  DipLeg leg;
  Nanos arrival = arrival_at_ingress_router;
  for (std::size_t a = k + 1; a <= m; ++a) {
    const Nanos epoch = graph.node(route.nodes[a]).epoch;
    CycleIndex u = ceil_div(arrival - epoch, t_dip);
    if (a == k + 1) u += r;
    const Nanos start = epoch + u * t_dip;
    leg.cycles.push_back(u);
    leg.cycle_starts.push_back(start);
    arrival = start + t_dip + graph.link(route.links[a]).delay;
  }
  leg.egress_arrival_bound = arrival;
  return leg;
}

PacketTimeline predict_timeline(const NetworkGraph& graph, const Route& route, Nanos msg_offset,
                                std::int64_t len, const PacketVars& vars) {
  if (!vars.src_offset) throw ModelError("unbound source offset");
  const TimeConfig& time = graph.time();
  const std::size_t n = route.links.size();
  const auto tx = [&](std::size_t a) { return graph.tx_time(route.links[a], len); };
  const auto d = [&](std::size_t a) { return graph.link(route.links[a]).delay; };

  PacketTimeline tl;
  tl.hops.reserve(route.nodes.size());
  const NodeIndex v0 = route.nodes[0];
  tl.message_arrival = graph.node(v0).epoch + msg_offset;
  const Nanos dep0 = tl.message_arrival + mod_floor(*vars.src_offset - msg_offset, time.t_ct());
  tl.hops.push_back({v0, tl.message_arrival, dep0, dep0 + tx(0), std::nullopt});
  Nanos t = dep0 + tx(0) + d(0);

  // Store-and-forward with immediate forwarding over TAS hops [from, to).
  const auto forward = [&](std::size_t from, std::size_t to) {
    for (std::size_t a = from; a < to; ++a) {
      tl.hops.push_back({route.nodes[a], t, t, t + tx(a), std::nullopt});
      t += tx(a) + d(a);
    }
  };

  if (!route.has_dip_segment()) {
    forward(1, n);
  } else {
    if (!vars.cycle_shift) throw ModelError("unbound cycle shift");
    if (!vars.extra_delay) throw ModelError("unbound extra delay");
    const std::size_t k = *route.ingress_edge;
    const std::size_t m = *route.last_dip;
    forward(1, k + 1);
    const DipLeg leg = walk_dip_segment(graph, route, t, *vars.cycle_shift);
    const Nanos t_dip = time.t_dip();
    for (std::size_t a = k + 1; a <= m; ++a) {
      const std::size_t i = a - (k + 1);
      const Nanos arrival = (a == k + 1) ? t : leg.cycle_starts[i - 1] + t_dip + d(a - 1);
      tl.hops.push_back({route.nodes[a], arrival, leg.cycle_starts[i], leg.cycle_starts[i] + t_dip, leg.cycles[i]});
    }
    const Nanos x = leg.egress_arrival_bound;
    const Nanos dep = x + *vars.extra_delay;
    tl.hops.push_back({route.nodes[m + 1], x, dep, dep + tx(m + 1), std::nullopt});
    t = dep + tx(m + 1) + d(m + 1);
    forward(m + 2, n);
  }
  tl.hops.push_back({route.nodes[n], t, t, t, std::nullopt});
  return tl;
}

Nanos local_offset(const NetworkGraph& graph, NodeIndex node, Nanos t) {
  return mod_floor(t - graph.node(node).epoch, graph.time().t_ct());
}

}  // namespace crossdet
