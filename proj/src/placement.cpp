#include "placement.hpp"

namespace crossdet::detail {

Footprint footprint(const NetworkGraph& graph, const Route& route, const PacketTimeline& tl, std::int64_t len) {
  const TimeConfig& time = graph.time();
  Footprint fp;
  fp.delay = tl.delay();
  for (std::size_t h = 0; h < route.links.size(); ++h) {
    const LinkIndex l = route.links[h];
    const HopTiming& hop = tl.hops[h];
    if (hop.cycle) {
      fp.loads.push_back({l, mod_floor(*hop.cycle, time.n_dip()), len, graph.tx_time(l, len)});
    } else {
      const Nanos start = local_offset(graph, hop.node, hop.departure);
      fp.windows.push_back({l, start, start + graph.tx_time(l, len)});
      if (!route.ingress_edge || h <= *route.ingress_edge) fp.ingress_windows = fp.windows.size();
    }
  }
  return fp;
}

bool core_queues_suffice(const NetworkGraph& graph, const Route& route, std::int64_t len) {
  if (!route.has_dip_segment()) return true;
  const Nanos t_dip = graph.time().t_dip();
  for (std::size_t a = *route.ingress_edge + 1; a < *route.last_dip; ++a) {
    const HopParams hp = hop_params(graph, route.links[a]);
    const Nanos tx = graph.tx_time(route.links[a], len);
    const std::int64_t advance =
        2 + ceil_div(hp.delay + hp.epoch_offset, t_dip) - ceil_div(tx + hp.delay + hp.epoch_offset, t_dip);
    if (advance > graph.link(route.links[a + 1]).queues - 1) return false;
  }
  return true;
}

int max_cycle_shift(const NetworkGraph& graph, const Route& route) {
  if (!route.has_dip_segment()) return 0;
  return graph.link(route.links[*route.ingress_edge + 1]).queues - 2;
}

Occupancy::Occupancy(const NetworkGraph& graph)
    : graph_(&graph), windows_(graph.link_count()), loads_(graph.link_count()) {}

bool Occupancy::windows_fit(const Footprint& fp, std::size_t first, std::size_t last) const {
  const Nanos t_ct = graph_->time().t_ct();
  for (std::size_t i = first; i < last; ++i) {
    const Window& w = fp.windows[i];
    if (w.end > t_ct) return false;
    const auto& busy = windows_[w.link];
    auto it = busy.lower_bound(w.start);
    if (it != busy.end() && it->first < w.end) return false;
    if (it != busy.begin() && std::prev(it)->second > w.start) return false;
  }
  return true;
}

bool Occupancy::loads_fit(const Footprint& fp) const {
  const Nanos t_dip = graph_->time().t_dip();
  for (const Load& ld : fp.loads) {
    std::int64_t bytes = ld.bytes;
    Nanos busy = ld.busy;
    if (!loads_[ld.link].empty()) {
      bytes += loads_[ld.link][static_cast<std::size_t>(ld.cycle)].first;
      busy += loads_[ld.link][static_cast<std::size_t>(ld.cycle)].second;
    }
    if (busy > t_dip) return false;
    if (static_cast<WideInt>(bytes) * 8'000'000'000 > static_cast<WideInt>(t_dip) * graph_->link(ld.link).bw_bps)
      return false;
  }
  return true;
}

void Occupancy::add(const Footprint& fp) {
  for (const Window& w : fp.windows) windows_[w.link].emplace(w.start, w.end);
  for (const Load& ld : fp.loads) {
    auto& per_cycle = loads_[ld.link];
    if (per_cycle.empty()) per_cycle.assign(static_cast<std::size_t>(graph_->time().n_dip()), {0, 0});
    per_cycle[static_cast<std::size_t>(ld.cycle)].first += ld.bytes;
    per_cycle[static_cast<std::size_t>(ld.cycle)].second += ld.busy;
  }
}

void Occupancy::remove(const Footprint& fp) {
  for (const Window& w : fp.windows) windows_[w.link].erase(w.start);
  for (const Load& ld : fp.loads) {
    auto& slot = loads_[ld.link][static_cast<std::size_t>(ld.cycle)];
    slot.first -= ld.bytes;
    slot.second -= ld.busy;
  }
}

}  // namespace crossdet::detail
