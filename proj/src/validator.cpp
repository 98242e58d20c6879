#include "crossdet/validator.hpp"

#include <algorithm>
#include <set>

namespace crossdet {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Conflict: return "Conflict";
    case ViolationKind::Capacity: return "Capacity";
    case ViolationKind::Deadline: return "Deadline";
    case ViolationKind::Domain: return "Domain";
  }
  return "?";
}

std::size_t ViolationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

namespace {

Violation make_violation(ViolationKind kind, std::vector<PacketKey> packets, std::int64_t slack, std::string detail) {
  Violation v;
  v.kind = kind;
  std::set<std::size_t> apps;
  for (const auto& p : packets) apps.insert(p.app);
  v.apps.assign(apps.begin(), apps.end());
  v.packets = std::move(packets);
  v.slack = slack;
  v.detail = std::move(detail);
  return v;
}

Violation app_domain(std::size_t app, std::string detail) {
  Violation v;
  v.kind = ViolationKind::Domain;
  v.apps = {app};
  v.detail = std::move(detail);
  return v;
}

/// Range checks for one packet; returns false when the packet cannot be timed.
bool check_packet_domain(const NetworkGraph& graph, const Route& route, const Packet& pkt, const PacketKey& key,
                         const PacketVars& vars, const Workload& workload, std::vector<Violation>& out) {
  const TimeConfig& time = graph.time();
  const std::string name = to_string(key, workload);
  bool ok = true;
  const auto fail = [&](std::int64_t slack, const std::string& what) {
    out.push_back(make_violation(ViolationKind::Domain, {key}, slack, name + ": " + what));
    ok = false;
  };
  const Nanos tx0 = graph.tx_time(route.links[0], pkt.len);
  if (!vars.src_offset) {
    fail(0, "unbound source offset");
  } else if (*vars.src_offset < 0 || *vars.src_offset > time.t_ct() - tx0) {
    const Nanos o = *vars.src_offset;
    fail(o < 0 ? -o : o - (time.t_ct() - tx0), "source offset outside [0, t_ct - tx]");
  }
  if (route.has_dip_segment()) {
    const int q = graph.link(route.links[*route.ingress_edge + 1]).queues;
    if (!vars.cycle_shift) {
      fail(0, "unbound cycle shift");
    } else if (*vars.cycle_shift < 0 || *vars.cycle_shift > q - 2) {
      const int r = *vars.cycle_shift;
      fail(r < 0 ? -r : r - (q - 2), "cycle shift outside [0, q - 2]");
    }
    if (!vars.extra_delay) {
      fail(0, "unbound extra delay");
    } else if (*vars.extra_delay < 0 || *vars.extra_delay >= time.t_ct()) {
      const Nanos e = *vars.extra_delay;
      fail(e < 0 ? -e : e - time.t_ct() + 1, "extra delay outside [0, t_ct)");
    }
    // A core hop may have to park a packet up to two cycles ahead of the open queue.
    const Nanos t_dip = time.t_dip();
    for (std::size_t a = *route.ingress_edge + 1; a < *route.last_dip; ++a) {
      const HopParams hp = hop_params(graph, route.links[a]);
      const Nanos tx = graph.tx_time(route.links[a], pkt.len);
      const std::int64_t advance =
          2 + ceil_div(hp.delay + hp.epoch_offset, t_dip) - ceil_div(tx + hp.delay + hp.epoch_offset, t_dip);
      const int q_next = graph.link(route.links[a + 1]).queues;
      if (advance > q_next - 1) fail(advance - (q_next - 1), "too few DIP queues after " + graph.node(route.nodes[a + 1]).id);
    }
  }
  return ok;
}

}  // namespace

ScheduleAnalysis analyze(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  ScheduleAnalysis out;
  if (schedule.apps.size() != workload.size()) {
    out.domain.push_back(app_domain(0, "schedule covers " + std::to_string(schedule.apps.size()) + " of " +
                                           std::to_string(workload.size()) + " applications"));
    return out;
  }
  const Nanos t_ct = graph.time().t_ct();
  for (std::size_t a = 0; a < workload.size(); ++a) {
    const AppAssignment& as = schedule.apps[a];
    const AppTraffic& at = workload.apps[a];
    if (!as.accepted) continue;
    if (!as.route) {
      out.domain.push_back(app_domain(a, at.app.id + ": accepted without a route"));
      continue;
    }
    const Route& route = *as.route;
    if (auto err = route_structure_error(graph, route.nodes)) {
      out.domain.push_back(app_domain(a, at.app.id + ": " + *err));
      continue;
    }
    if (route.nodes.front() != at.src || route.nodes.back() != at.dest) {
      out.domain.push_back(app_domain(a, at.app.id + ": route endpoints differ from the application's"));
      continue;
    }
    if (as.packets.size() != at.packets.size()) {
      out.domain.push_back(app_domain(a, at.app.id + ": packet variable count mismatch"));
      continue;
    }
    for (std::size_t s = 0; s < at.packets.size(); ++s) {
      const Packet& pkt = at.packets[s];
      const PacketKey key{a, pkt.msg, pkt.pkt};
      if (!check_packet_domain(graph, route, pkt, key, as.packets[s], workload, out.domain)) continue;
      PacketTimeline tl = predict_timeline(graph, route, at.message(pkt.msg).arrival_offset, pkt.len, as.packets[s]);
      bool straddles = false;
      for (std::size_t h = 0; h + 1 < tl.hops.size(); ++h) {
        const NodeIndex v = tl.hops[h].node;
        if (!is_tas_side(graph.node(v).kind)) continue;
        const Nanos off = local_offset(graph, v, tl.hops[h].departure);
        const Nanos tx = tl.hops[h].window_end - tl.hops[h].departure;
        if (off + tx > t_ct) {
          out.domain.push_back(make_violation(ViolationKind::Domain, {key}, off + tx - t_ct,
                                              to_string(key, workload) + ": transmission at " + graph.node(v).id +
                                                  " crosses the cycle-time boundary"));
          straddles = true;
        }
      }
      if (!straddles) out.timelines.emplace(key, std::move(tl));
    }
  }
  return out;
}

namespace {

LinkIndex hop_link(const NetworkGraph& graph, const PacketTimeline& tl, std::size_t h) {
  return *graph.find_link(tl.hops[h].node, tl.hops[h + 1].node);
}

}  // namespace

std::vector<Violation> check_conflicts(const ScheduleAnalysis& analysis, const NetworkGraph& graph,
                                       const Workload& workload) {
  struct Use {
    Nanos start;
    Nanos tx;
    PacketKey key;
  };
  std::map<LinkIndex, std::vector<Use>> per_link;
  for (const auto& [key, tl] : analysis.timelines) {
    for (std::size_t h = 0; h + 1 < tl.hops.size(); ++h) {
      const HopTiming& hop = tl.hops[h];
      if (!is_tas_side(graph.node(hop.node).kind)) continue;
      per_link[hop_link(graph, tl, h)].push_back(
          {local_offset(graph, hop.node, hop.departure), hop.window_end - hop.departure, key});
    }
  }
  std::vector<Violation> out;
  for (auto& [link, uses] : per_link) {
    std::sort(uses.begin(), uses.end(), [](const Use& a, const Use& b) {
      return a.start != b.start ? a.start < b.start : a.key < b.key;
    });
    for (std::size_t i = 0; i < uses.size(); ++i) {
      for (std::size_t j = i + 1; j < uses.size(); ++j) {
        const Use& a = uses[i];
        const Use& b = uses[j];
        if (a.start >= b.start + b.tx || b.start >= a.start + a.tx) {
          if (b.start >= a.start + a.tx) break;  // sorted: nothing later overlaps a
          continue;
        }
        const Nanos overlap = std::min(a.start + a.tx, b.start + b.tx) - std::max(a.start, b.start);
        Violation v = make_violation(ViolationKind::Conflict, {a.key, b.key}, overlap,
                                     to_string(a.key, workload) + " and " + to_string(b.key, workload) +
                                         " overlap by " + std::to_string(overlap) + " ns");
        v.link = link;
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::vector<Violation> check_capacity(const ScheduleAnalysis& analysis, const NetworkGraph& graph,
                                      const Workload& workload) {
  struct Load {
    std::int64_t bytes = 0;
    Nanos busy = 0;
    std::vector<PacketKey> packets;
  };
  const TimeConfig& time = graph.time();
  std::map<std::pair<LinkIndex, CycleIndex>, Load> loads;
  for (const auto& [key, tl] : analysis.timelines) {
    const std::int64_t len = workload.apps[key.app].packet(key.msg, key.pkt).len;
    for (std::size_t h = 0; h + 1 < tl.hops.size(); ++h) {
      if (!tl.hops[h].cycle) continue;
      const LinkIndex l = hop_link(graph, tl, h);
      Load& load = loads[{l, mod_floor(*tl.hops[h].cycle, time.n_dip())}];
      load.bytes += len;
      load.busy += graph.tx_time(l, len);
      load.packets.push_back(key);
    }
  }
  std::vector<Violation> out;
  for (auto& [where, load] : loads) {
    const auto& [link, cycle] = where;
    const std::int64_t bw = graph.link(link).bw_bps;
    // bytes * 8 * 1e9 <= t_dip * bw, exactly.
    const WideInt lhs = static_cast<WideInt>(load.bytes) * 8 * 1'000'000'000;
    const WideInt rhs = static_cast<WideInt>(time.t_dip()) * bw;
    if (lhs <= rhs && load.busy <= time.t_dip()) continue;
    const std::int64_t cap_bytes = static_cast<std::int64_t>(rhs / (8LL * 1'000'000'000));
    const std::int64_t excess = std::max<std::int64_t>(load.bytes - cap_bytes, 1);
    Violation v = make_violation(ViolationKind::Capacity, load.packets, excess,
                                 graph.link(link).src + "->" + graph.link(link).dst + " cycle " +
                                     std::to_string(cycle) + " carries " + std::to_string(load.bytes) + " bytes");
    v.link = link;
    v.cycle = cycle;
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<Nanos> application_delay(const ScheduleAnalysis& analysis, std::size_t app) {
  std::optional<Nanos> worst;
  for (auto it = analysis.timelines.lower_bound(PacketKey{app, 0, 0});
       it != analysis.timelines.end() && it->first.app == app; ++it)
    worst = std::max(worst.value_or(it->second.delay()), it->second.delay());
  return worst;
}

std::vector<Violation> check_deadlines(const ScheduleAnalysis& analysis, const Schedule& schedule,
                                       const Workload& workload) {
  std::vector<Violation> out;
  for (std::size_t a = 0; a < workload.size() && a < schedule.apps.size(); ++a) {
    if (!schedule.apps[a].accepted) continue;
    const Nanos e2e = workload.apps[a].app.e2e;
    std::vector<PacketKey> late;
    Nanos worst = 0;
    for (auto it = analysis.timelines.lower_bound(PacketKey{a, 0, 0});
         it != analysis.timelines.end() && it->first.app == a; ++it) {
      worst = std::max(worst, it->second.delay());
      if (it->second.delay() > e2e) late.push_back(it->first);
    }
    if (late.empty()) continue;
    out.push_back(make_violation(ViolationKind::Deadline, std::move(late), worst - e2e,
                                 workload.apps[a].app.id + ": delay " + std::to_string(worst) +
                                     " ns exceeds deadline " + std::to_string(e2e) + " ns"));
  }
  return out;
}

std::vector<Violation> check_conflicts(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  return check_conflicts(analyze(schedule, graph, workload), graph, workload);
}

std::vector<Violation> check_capacity(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  return check_capacity(analyze(schedule, graph, workload), graph, workload);
}

std::vector<Violation> check_deadlines(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  return check_deadlines(analyze(schedule, graph, workload), schedule, workload);
}

ViolationReport validate(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  ScheduleAnalysis analysis = analyze(schedule, graph, workload);
  ViolationReport report;
  report.violations = std::move(analysis.domain);
  for (auto& v : check_conflicts(analysis, graph, workload)) report.violations.push_back(std::move(v));
  for (auto& v : check_capacity(analysis, graph, workload)) report.violations.push_back(std::move(v));
  for (auto& v : check_deadlines(analysis, schedule, workload)) report.violations.push_back(std::move(v));
  return report;
}

}  // namespace crossdet
