#include "crossdet/device_config.hpp"

#include <algorithm>
#include <tuple>

#include "crossdet/validator.hpp"

namespace crossdet {

std::string gate_string(int open_queue) {
  std::string s(8, 'c');
  if (open_queue >= 1 && open_queue <= 8) s[static_cast<std::size_t>(open_queue - 1)] = 'o';
  return s;
}

namespace {

ScheduleAnalysis feasible_analysis(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  ScheduleAnalysis analysis = analyze(schedule, graph, workload);
  if (!analysis.domain.empty()) throw ModelError("cannot compile an infeasible schedule: " + analysis.domain.front().detail);
  return analysis;
}

struct Visit {
  PacketKey key;
  const PacketTimeline* timeline;
  std::size_t hop;
};

/// Every (packet, hop) at which the packet sits at `node`.
std::vector<Visit> visits(const ScheduleAnalysis& analysis, NodeIndex node) {
  std::vector<Visit> out;
  for (const auto& [key, tl] : analysis.timelines)
    for (std::size_t h = 0; h + 1 < tl.hops.size(); ++h)
      if (tl.hops[h].node == node) out.push_back({key, &tl, h});
  return out;
}

std::vector<GateControlList> gcl_for(const ScheduleAnalysis& analysis, const Schedule& schedule,
                                     const NetworkGraph& graph, NodeIndex node) {
  if (!is_tas_side(graph.node(node).kind))
    throw ModelError("node '" + graph.node(node).id + "' has no gate control list");
  const Nanos t_ct = graph.time().t_ct();
  const auto here = visits(analysis, node);
  std::vector<GateControlList> out;
  for (LinkIndex port : graph.out_links(node)) {
    GateControlList gcl;
    gcl.node = graph.node(node).id;
    gcl.port = port;
    gcl.cycle = t_ct;
    struct Resident {
      Nanos arrival, departure;
    };
    for (const Visit& v : here) {
      if (schedule.apps[v.key.app].route->links[v.hop] != port) continue;
      const HopTiming& hop = v.timeline->hops[v.hop];
      GateControlEntry e;
      e.offset = local_offset(graph, node, hop.departure);
      e.duration = hop.window_end - hop.departure;
      e.packet = v.key;
      gcl.entries.push_back(e);
    }
    std::sort(gcl.entries.begin(), gcl.entries.end(),
              [](const auto& a, const auto& b) { return std::tie(a.offset, a.packet) < std::tie(b.offset, b.packet); });
    for (std::size_t i = 0; i + 1 < gcl.entries.size(); ++i)
      if (gcl.entries[i].offset + gcl.entries[i].duration > gcl.entries[i + 1].offset)
        throw ModelError("overlapping transmissions on " + graph.link(port).src + "->" + graph.link(port).dst);
    const int top = std::min(graph.link(port).queues, 8);
    const int deterministic = top - kBestEffortQueue;
    if (!gcl.entries.empty() && deterministic < 1)
      throw ModelError("port " + graph.link(port).src + "->" + graph.link(port).dst + " has no deterministic queue");
    // A queue is FIFO: two packets sharing one must leave in the order they
    // arrived. Sources and edge switches rank their queues by departure instead.
    const bool ranked = graph.node(node).kind == NodeKind::SourceHost || graph.node(node).kind == NodeKind::TasEdgeSwitch;
    std::vector<Resident> stay;
    for (const auto& e : gcl.entries) {
      const auto it = std::find_if(here.begin(), here.end(), [&](const Visit& v) {
        return v.key == e.packet && schedule.apps[v.key.app].route->links[v.hop] == port;
      });
      const HopTiming& hop = it->timeline->hops[it->hop];
      stay.push_back({e.offset - (hop.departure - hop.arrival), e.offset});
    }
    // Packets arriving together are queued in key order.
    auto inverted = [&](std::size_t i, std::size_t j) {
      const Resident a = stay[i];
      for (Nanos shift : {-t_ct, Nanos{0}, t_ct}) {
        const Resident c{stay[j].arrival + shift, stay[j].departure + shift};
        const bool a_first = std::tie(a.arrival, gcl.entries[i].packet) < std::tie(c.arrival, gcl.entries[j].packet);
        if (a_first && c.departure < a.departure && c.arrival < a.departure) return true;
        if (!a_first && a.departure < c.departure && a.arrival < c.departure) return true;
      }
      return false;
    };
    for (std::size_t i = 0; i < gcl.entries.size(); ++i) {
      auto& e = gcl.entries[i];
      e.queue = 0;
      for (int k = 0; k < deterministic && e.queue == 0; ++k) {
        const int q = top - static_cast<int>((i + static_cast<std::size_t>(k)) % static_cast<std::size_t>(deterministic));
        bool ok = true;
        for (std::size_t j = 0; j < i && ok && !ranked; ++j)
          if (gcl.entries[j].queue == q && inverted(i, j)) ok = false;
        if (ok) e.queue = q;
      }
      if (e.queue == 0)
        throw ModelError("no queue at " + gcl.node + " keeps packet " + std::to_string(e.packet.pkt) + " of app " + std::to_string(e.packet.app) + " in arrival order");
      e.gate_states = gate_string(e.queue);
    }
    out.push_back(std::move(gcl));
  }
  return out;
}

DipCycleTable dip_for(const ScheduleAnalysis& analysis, const Schedule& schedule, const NetworkGraph& graph,
                      const Workload& workload, NodeIndex node) {
  if (!is_dip(graph.node(node).kind)) throw ModelError("node '" + graph.node(node).id + "' is not a DIP router");
  const TimeConfig& time = graph.time();
  DipCycleTable table;
  table.node = graph.node(node).id;
  for (LinkIndex l = 0; l < graph.link_count(); ++l) {
    if (graph.link_dst(l) != node || !is_dip(graph.node(graph.link_src(l)).kind)) continue;
    CycleMapping m;
    m.in_link = l;
    for (CycleIndex c = 0; c < time.n_dip(); ++c) m.next.push_back(vartheta_dip_to_dip(c, hop_params(graph, l), time));
    table.core.push_back(std::move(m));
  }
  for (const Visit& v : visits(analysis, node)) {
    const Route& route = *schedule.apps[v.key.app].route;
    if (v.hop != *route.ingress_edge + 1) continue;
    const HopTiming& hop = v.timeline->hops[v.hop];
    IngressEntry e;
    e.packet = v.key;
    e.in_link = route.links[v.hop - 1];
    e.out_link = route.links[v.hop];
    const CycleIndex current = ceil_div(hop.arrival - graph.node(node).epoch, time.t_dip()) - 1;
    e.arrival_cycle = mod_floor(current, time.n_dip());
    e.shift = *schedule.vars(v.key, workload).cycle_shift;
    e.out_cycle = mod_floor(*hop.cycle, time.n_dip());
    e.queue_advance = static_cast<int>(*hop.cycle - current);
    table.ingress.push_back(e);
  }
  return table;
}

PifoProgram pifo_for(const ScheduleAnalysis& analysis, const Schedule& schedule, const NetworkGraph& graph,
                     const Workload& workload, NodeIndex node) {
  if (graph.node(node).kind != NodeKind::TasEdgeSwitch)
    throw ModelError("node '" + graph.node(node).id + "' is not a TAS edge switch");
  const TimeConfig& time = graph.time();
  PifoProgram prog;
  prog.node = graph.node(node).id;
  for (const Visit& v : visits(analysis, node)) {
    const Route& route = *schedule.apps[v.key.app].route;
    if (!route.last_dip || v.hop != *route.last_dip + 1) continue;
    const std::size_t m = *route.last_dip;
    const PacketVars& vars = schedule.vars(v.key, workload);
    PifoEntry e;
    e.packet = v.key;
    e.port = route.links[v.hop];
    e.arrival_bound = theta_dip_to_tas(mod_floor(*v.timeline->hops[m].cycle, time.n_dip()),
                                       hop_params(graph, route.links[m]), time);
    e.extra_delay = *vars.extra_delay;
    e.rank = local_offset(graph, node, v.timeline->hops[v.hop].departure);
    if (mod_floor(e.arrival_bound + e.extra_delay, time.t_ct()) != e.rank)
      throw InvariantError("PIFO rank disagrees with the egress mapping for " + to_string(v.key, workload));
    prog.entries.push_back(e);
  }
  std::sort(prog.entries.begin(), prog.entries.end(),
            [](const auto& a, const auto& b) { return std::tie(a.port, a.rank, a.packet) < std::tie(b.port, b.rank, b.packet); });
  for (std::size_t i = 0; i + 1 < prog.entries.size(); ++i)
    if (prog.entries[i].port == prog.entries[i + 1].port && prog.entries[i].rank == prog.entries[i + 1].rank)
      throw ModelError("duplicate PIFO rank " + std::to_string(prog.entries[i].rank) + " at " + prog.node);
  return prog;
}

}  // namespace

std::vector<GateControlList> compile_gcl(const Schedule& schedule, const NetworkGraph& graph,
                                         const Workload& workload, NodeIndex node) {
  return gcl_for(feasible_analysis(schedule, graph, workload), schedule, graph, node);
}

DipCycleTable compile_dip_table(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload,
                                NodeIndex node) {
  return dip_for(feasible_analysis(schedule, graph, workload), schedule, graph, workload, node);
}

PifoProgram compile_pifo(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload,
                         NodeIndex node) {
  return pifo_for(feasible_analysis(schedule, graph, workload), schedule, graph, workload, node);
}

DevicePrograms compile_all(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  const ScheduleAnalysis analysis = feasible_analysis(schedule, graph, workload);
  DevicePrograms out;
  for (NodeIndex v = 0; v < graph.node_count(); ++v) {
    const NodeKind kind = graph.node(v).kind;
    if (is_tas_side(kind))
      for (auto& g : gcl_for(analysis, schedule, graph, v)) out.gcls.push_back(std::move(g));
    if (is_dip(kind)) out.dip_tables.push_back(dip_for(analysis, schedule, graph, workload, v));
    if (kind == NodeKind::TasEdgeSwitch) out.pifos.push_back(pifo_for(analysis, schedule, graph, workload, v));
  }
  return out;
}

}  // namespace crossdet
