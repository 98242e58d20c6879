#include "crossdet/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>

namespace crossdet {

InterferenceProfile uniform_interference(const NetworkGraph& graph, const std::vector<LinkIndex>& links,
                                         double utilization, std::uint64_t seed, int flows_per_link,
                                         std::int64_t packet_bytes) {
  if (utilization < 0) throw ModelError("utilization must be non-negative");
  if (flows_per_link < 1) throw ModelError("at least one interference flow per link");
  if (packet_bytes < 1) throw ModelError("interference packets need a positive size");
  InterferenceProfile out;
  std::mt19937_64 rng(seed);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (LinkIndex l : links) {
    // Unequal shares keep the flows from beating in lockstep with the applications.
    std::vector<double> share(static_cast<std::size_t>(flows_per_link));
    double sum = 0;
    for (double& w : share) sum += (w = 0.5 + unit());
    for (double w : share) {
      const auto rate = static_cast<std::int64_t>(utilization * static_cast<double>(graph.link(l).bw_bps) * w / sum);
      if (rate <= 0) continue;
      const Nanos interval = transmission_time(packet_bytes, rate);
      out.flows.push_back({l, rate, packet_bytes, static_cast<Nanos>(rng() % static_cast<std::uint64_t>(interval))});
    }
  }
  return out;
}

namespace {

// Same-instant events run in this order: gates move before anything looks at
// them, and ports are served last so that every arrival of the instant is queued.
enum class EventKind { GateChange, CycleBoundary, PacketArrival, TransmitComplete, PortService };

struct Event {
  Nanos time = 0;
  EventKind kind = EventKind::PortService;
  std::uint64_t seq = 0;
  std::size_t target = 0;  // packet, port or node
  std::size_t entry = 0;
  std::int64_t value = 0;  // gate open flag or cycle number
  bool operator>(const Event& o) const {
    return std::tie(time, kind, seq) > std::tie(o.time, o.kind, o.seq);
  }
};

enum class Class { Scheduled, AppBestEffort, Interference };

struct SimPacket {
  Class cls = Class::Interference;
  PacketKey key;
  std::int64_t len = 0;
  const Route* route = nullptr;
  std::size_t flow = 0;
  std::size_t hop = 0;
  Nanos arrived = 0;
  Nanos rank = 0;
  bool ranked = false;
  CycleIndex sent_cycle = 0;
  std::size_t record = 0;
  std::size_t message = 0;
  bool done = false;
};

// rank, arrival, app, message, packet, seq, pool index
using QueueKey = std::tuple<Nanos, Nanos, std::size_t, int, int, std::uint64_t, std::size_t>;

struct Port {
  LinkIndex link = 0;
  NodeIndex node = 0;
  bool dip = false;
  bool busy = false;
  std::deque<std::size_t> best_effort;
  // TAS side
  std::vector<GateControlEntry> gcl;
  std::map<PacketKey, std::size_t> entry_of;
  std::vector<Nanos> gate_offsets;
  std::map<int, std::set<QueueKey>> queues;
  int open_queue = 0;
  std::size_t open_entry = 0;
  Nanos open_at = 0;
  Nanos close_at = 0;
  // DIP side
  std::map<CycleIndex, std::deque<std::size_t>> cycles;
  CycleIndex current = std::numeric_limits<CycleIndex>::min();
  Nanos cycle_end = 0;
};

struct MessageState {
  std::size_t pending = 0;
  bool dropped = false;
  Nanos last = 0;
};

class Engine {
 public:
  Engine(const NetworkGraph& graph, const Workload& workload, const SimOptions& options, bool gated)
      : graph_(graph), workload_(workload), options_(options), gated_(gated) {
    if (options.horizon < 1) throw ModelError("simulation horizon must be at least one hypercycle");
    const Nanos t_ct = graph.time().t_ct();
    traffic_end_ = (static_cast<Nanos>(options.horizon) + 2) * t_ct;
    hard_stop_ = traffic_end_ + 64 * t_ct;
    ports_.resize(graph.link_count());
    for (LinkIndex l = 0; l < graph.link_count(); ++l) {
      ports_[l].link = l;
      ports_[l].node = graph.link_src(l);
      ports_[l].dip = is_dip(graph.node(ports_[l].node).kind);
    }
  }

  void load(const DevicePrograms& programs) {
    const Nanos t_ct = graph_.time().t_ct();
    for (const auto& gcl : programs.gcls) {
      Port& port = ports_.at(gcl.port);
      port.gcl = gcl.entries;
      for (std::size_t i = 0; i < gcl.entries.size(); ++i) {
        const auto& e = gcl.entries[i];
        port.entry_of[e.packet] = i;
        port.gate_offsets.push_back(e.offset);
        const Nanos base = graph_.node(port.node).epoch + e.offset;
        push({base + ceil_div(-base, t_ct) * t_ct, EventKind::GateChange, 0, gcl.port, i, 1});
      }
      std::sort(port.gate_offsets.begin(), port.gate_offsets.end());
    }
    for (const auto& table : programs.dip_tables) {
      const NodeIndex v = graph_.node_index(table.node);
      for (const auto& m : table.core) core_[{v, m.in_link}] = m.next;
      for (const auto& e : table.ingress) ingress_[{v, e.packet}] = e;
      const Nanos epoch = graph_.node(v).epoch;
      const CycleIndex first = ceil_div(-epoch, graph_.time().t_dip());
      push({epoch + first * graph_.time().t_dip(), EventKind::CycleBoundary, 0, v, 0, first});
    }
    for (const auto& prog : programs.pifos) {
      const NodeIndex v = graph_.node_index(prog.node);
      for (const auto& e : prog.entries) pifo_[{v, e.packet}] = e;
    }
  }

  void add_interference(const InterferenceProfile& profile) {
    flows_ = profile.flows;
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      if (flows_[f].rate_bps <= 0 || flows_[f].packet_bytes <= 0) throw ModelError("interference flow needs a positive rate and size");
      if (flows_[f].phase < 0) throw ModelError("interference phase must be non-negative");
      inject(f, flows_[f].phase);
    }
  }

  void add_app(std::size_t a, const Route& route, Class cls) {
    const AppTraffic& at = workload_.apps.at(a);
    const Nanos t_ct = graph_.time().t_ct();
    const auto per_cycle = static_cast<std::int64_t>(at.messages.size());
    for (int h = 0; h < options_.horizon; ++h) {
      for (const Message& msg : at.messages) {
        MessageRecord rec;
        rec.app = a;
        rec.msg_index = h * per_cycle + msg.index;
        rec.arrival = graph_.node(at.src).epoch + h * t_ct + msg.arrival_offset;
        const std::size_t mi = trace_.messages.size();
        trace_.messages.push_back(rec);
        messages_.push_back({});
        for (const Packet& p : at.packets) {
          if (p.msg != msg.index) continue;
          SimPacket sp;
          sp.cls = cls;
          sp.key = {a, static_cast<int>(rec.msg_index), p.pkt};
          sp.len = p.len;
          sp.route = &route;
          sp.message = mi;
          ++messages_[mi].pending;
          push({rec.arrival, EventKind::PacketArrival, 0, spawn(sp), 0, 0});
        }
      }
    }
  }

  SimTrace finish() {
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      if (now_ > hard_stop_) stranded();
      switch (ev.kind) {
        case EventKind::GateChange: gate(ev); break;
        case EventKind::CycleBoundary: boundary(ev); break;
        case EventKind::PacketArrival: arrive(ev.target); break;
        case EventKind::TransmitComplete:
          ports_[ev.target].busy = false;
          serve(ev.target);
          break;
        case EventKind::PortService: serve(ev.target); break;
      }
    }
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      const MessageState& m = messages_[i];
      if (m.dropped) continue;
      if (m.pending != 0) throw InvariantError("a message was never delivered");
      trace_.messages[i].completion = m.last;
    }
    std::sort(trace_.hops.begin(), trace_.hops.end(), [](const HopRecord& a, const HopRecord& b) {
      return std::tie(a.app, a.msg_index, a.pkt, a.arrival) < std::tie(b.app, b.msg_index, b.pkt, b.arrival);
    });
    std::stable_sort(trace_.messages.begin(), trace_.messages.end(), [](const auto& a, const auto& b) {
      return std::tie(a.app, a.msg_index) < std::tie(b.app, b.msg_index);
    });
    return std::move(trace_);
  }

 private:
  std::size_t spawn(const SimPacket& p) {
    packets_.push_back(p);
    if (p.cls == Class::Scheduled) ++in_flight_;
    return packets_.size() - 1;
  }

  void push(Event ev) {
    ev.seq = seq_++;
    events_.push(ev);
  }

  // Periodic events stop once application traffic is over; best-effort
  // packets still queued then are abandoned.
  bool alive() const { return now_ < traffic_end_ || in_flight_ > 0; }

  void inject(std::size_t f, Nanos at) {
    if (at >= traffic_end_) return;
    SimPacket p;
    p.flow = f;
    p.len = flows_[f].packet_bytes;
    push({at, EventKind::PacketArrival, 0, spawn(p), 0, 0});
  }

  void retire(std::size_t pid) {
    packets_[pid].done = true;
    if (packets_[pid].cls == Class::Scheduled) --in_flight_;
  }

  [[noreturn]] void stranded() const {
    for (const SimPacket& p : packets_)
      if (p.cls == Class::Scheduled && !p.done)
        throw InvariantError(describe(p) + " is stuck at " + graph_.node(p.route->nodes[p.hop]).id);
    throw InvariantError("simulation did not drain");
  }

  void enqueue_best_effort(std::size_t pid, Port& port) {
    SimPacket& p = packets_[pid];
    if (port.best_effort.size() >= options_.best_effort_capacity) {
      if (p.cls == Class::Interference) {
        ++trace_.interference_drops;
      } else {
        ++trace_.app_drops;
        messages_[p.message].dropped = true;
      }
      retire(pid);
      return;
    }
    port.best_effort.push_back(pid);
  }

  void arrive(std::size_t pid) {
    SimPacket& p = packets_[pid];
    p.arrived = now_;
    if (p.cls == Class::Interference) {
      if (p.hop == 0) {
        const InterferenceFlow& fl = flows_[p.flow];
        ++trace_.interference_sent;
        inject(p.flow, now_ + transmission_time(fl.packet_bytes, fl.rate_bps));
        enqueue_best_effort(pid, ports_[fl.link]);
        push({now_, EventKind::PortService, 0, fl.link, 0, 0});
      } else {
        retire(pid);
      }
      return;
    }
    const Route& route = *p.route;
    const NodeIndex node = route.nodes[p.hop];
    p.record = trace_.hops.size();
    trace_.hops.push_back({p.key.app, p.key.msg, p.key.pkt, node, now_, now_});
    if (p.hop == route.links.size()) {
      MessageState& m = messages_[p.message];
      --m.pending;
      m.last = std::max(m.last, now_);
      retire(pid);
      return;
    }
    const LinkIndex l = route.links[p.hop];
    Port& port = ports_[l];
    if (p.cls == Class::Scheduled)
      enqueue_scheduled(pid, port);
    else
      enqueue_best_effort(pid, port);
    push({now_, EventKind::PortService, 0, l, 0, 0});
  }

  PacketKey program_key(const SimPacket& p) const {
    const auto per_cycle = static_cast<int>(workload_.apps[p.key.app].messages.size());
    return {p.key.app, (p.key.msg - 1) % per_cycle + 1, p.key.pkt};
  }

  std::string describe(const SimPacket& p) const {
    return "packet " + std::to_string(p.key.pkt) + " of message " + std::to_string(p.key.msg) + " of " +
           workload_.apps[p.key.app].app.id;
  }

  void enqueue_scheduled(std::size_t pid, Port& port) {
    SimPacket& p = packets_[pid];
    const PacketKey key = program_key(p);
    const TimeConfig& time = graph_.time();
    if (!port.dip) {
      const auto it = port.entry_of.find(key);
      if (it == port.entry_of.end())
        throw InvariantError("no gate entry for " + describe(p) + " at " + graph_.node(port.node).id);
      // Sources and edge switches rank by departure; TAS switches are FIFO.
      const NodeKind kind = graph_.node(port.node).kind;
      p.ranked = kind == NodeKind::SourceHost || kind == NodeKind::TasEdgeSwitch;
      p.rank = 0;
      if (p.ranked) {
        const Nanos local = mod_floor(now_ - graph_.node(port.node).epoch, time.t_ct());
        const auto pf = pifo_.find({port.node, key});
        if (pf != pifo_.end()) {
          const Nanos bound = now_ + mod_floor(pf->second.arrival_bound - local, time.t_ct());
          p.rank = bound + pf->second.extra_delay;
        } else {
          p.rank = now_ + mod_floor(port.gcl[it->second].offset - local, time.t_ct());
        }
      }
      // Forwarding nodes: arriving after our own gate opened means it is missed.
      if (graph_.node(port.node).kind != NodeKind::SourceHost && port.open_queue != 0 &&
          port.open_entry == it->second && now_ > port.open_at && now_ < port.close_at)
        throw InvariantError(describe(p) + " reached " + graph_.node(port.node).id + " after its gate opened");
      port.queues[port.gcl[it->second].queue].insert({p.rank, now_, p.key.app, p.key.msg, p.key.pkt, seq_++, pid});
      return;
    }
    const Nanos t_dip = time.t_dip();
    const std::int64_t n = time.n_dip();
    const CycleIndex cur = ceil_div(now_ - graph_.node(port.node).epoch, t_dip) - 1;
    CycleIndex target = 0;
    const Route& route = *p.route;
    if (p.hop == *route.ingress_edge + 1) {
      const auto it = ingress_.find({port.node, key});
      if (it == ingress_.end())
        throw InvariantError("no ingress entry for " + describe(p) + " at " + graph_.node(port.node).id);
      const IngressEntry& e = it->second;
      if (mod_floor(cur, n) != e.arrival_cycle)
        throw InvariantError(describe(p) + " reached " + graph_.node(port.node).id + " in an unexpected cycle");
      target = cur + e.queue_advance;
      if (mod_floor(target, n) != e.out_cycle) throw InvariantError("ingress entry disagrees with its own cycle");
    } else {
      const auto it = core_.find({port.node, route.links[p.hop - 1]});
      if (it == core_.end()) throw InvariantError("no cycle mapping at " + graph_.node(port.node).id);
      const CycleIndex y = it->second.at(static_cast<std::size_t>(mod_floor(p.sent_cycle, n)));
      target = cur + 1 + mod_floor(y - cur - 1, n);
    }
    if (target - cur > graph_.link(port.link).queues - 1)
      throw InvariantError("cycle queues of " + graph_.node(port.node).id + " overflow");
    if (target <= port.current) throw InvariantError(describe(p) + " mapped to a cycle already served");
    port.cycles[target].push_back(pid);
  }

  void gate(const Event& ev) {
    Port& port = ports_[ev.target];
    const GateControlEntry& e = port.gcl[ev.entry];
    if (ev.value == 1) {
      port.open_queue = e.queue;
      port.open_entry = ev.entry;
      port.open_at = now_;
      port.close_at = now_ + e.duration;
      push({port.close_at, EventKind::GateChange, 0, ev.target, ev.entry, 0});
      if (alive()) push({now_ + graph_.time().t_ct(), EventKind::GateChange, 0, ev.target, ev.entry, 1});
    } else {
      for (const auto& entry : port.queues[e.queue]) {
        const SimPacket& p = packets_[std::get<6>(entry)];
        const bool due = p.ranked ? p.rank == port.open_at : p.arrived <= port.open_at;
        if (program_key(p) == e.packet && due)
          throw InvariantError(describe(p) + " missed its gate at " + graph_.node(port.node).id);
      }
      if (port.open_entry == ev.entry) port.open_queue = 0;
    }
    push({now_, EventKind::PortService, 0, ev.target, 0, 0});
  }

  void boundary(const Event& ev) {
    const NodeIndex v = ev.target;
    for (LinkIndex l : graph_.out_links(v)) {
      Port& port = ports_[l];
      for (auto it = port.cycles.begin(); it != port.cycles.end() && it->first < ev.value;) {
        if (!it->second.empty())
          throw InvariantError("cycle " + std::to_string(it->first) + " at " + graph_.node(v).id + " overran");
        it = port.cycles.erase(it);
      }
      port.current = ev.value;
      port.cycle_end = now_ + graph_.time().t_dip();
      push({now_, EventKind::PortService, 0, l, 0, 0});
    }
    if (alive()) push({now_ + graph_.time().t_dip(), EventKind::CycleBoundary, 0, v, 0, ev.value + 1});
  }

  Nanos next_gate_open(const Port& port) const {
    if (port.gate_offsets.empty()) return std::numeric_limits<Nanos>::max();
    const Nanos t_ct = graph_.time().t_ct();
    const Nanos local = mod_floor(now_ - graph_.node(port.node).epoch, t_ct);
    const auto it = std::lower_bound(port.gate_offsets.begin(), port.gate_offsets.end(), local);
    return it == port.gate_offsets.end() ? now_ + port.gate_offsets.front() + t_ct - local : now_ + *it - local;
  }

  void transmit(Port& port, std::size_t pid) {
    SimPacket& p = packets_[pid];
    const Nanos tx = graph_.tx_time(port.link, p.len);
    port.busy = true;
    if (p.cls != Class::Interference) trace_.hops[p.record].departure = now_;
    if (port.dip) p.sent_cycle = port.current;
    ++p.hop;
    push({now_ + tx, EventKind::TransmitComplete, 0, port.link, 0, 0});
    push({now_ + tx + graph_.link(port.link).delay, EventKind::PacketArrival, 0, pid, 0, 0});
  }

  void serve_best_effort(Port& port, Nanos limit) {
    if (port.best_effort.empty()) return;
    const std::size_t pid = port.best_effort.front();
    if (now_ + graph_.tx_time(port.link, packets_[pid].len) > limit) return;
    port.best_effort.pop_front();
    transmit(port, pid);
  }

  void serve(std::size_t l) {
    Port& port = ports_[l];
    if (port.busy) return;
    if (!gated_) {
      serve_best_effort(port, std::numeric_limits<Nanos>::max());
      return;
    }
    if (port.dip) {
      const auto it = port.cycles.find(port.current);
      if (it != port.cycles.end() && !it->second.empty()) {
        const std::size_t pid = it->second.front();
        if (now_ + graph_.tx_time(l, packets_[pid].len) > port.cycle_end)
          throw InvariantError("cycle " + std::to_string(port.current) + " at " + graph_.node(port.node).id +
                               " cannot carry its packets");
        it->second.pop_front();
        transmit(port, pid);
        return;
      }
      serve_best_effort(port, port.current == std::numeric_limits<CycleIndex>::min() ? now_ : port.cycle_end);
      return;
    }
    if (port.open_queue != 0 && now_ < port.close_at) {
      auto& q = port.queues[port.open_queue];
      if (q.empty()) return;
      const std::size_t pid = std::get<6>(*q.begin());
      const SimPacket& p = packets_[pid];
      if (program_key(p) != port.gcl[port.open_entry].packet) return;
      if (now_ + graph_.tx_time(l, p.len) > port.close_at) return;
      if (p.ranked) {
        if (p.rank > now_) return;
        if (p.rank < now_) throw InvariantError(describe(p) + " left " + graph_.node(port.node).id + " late");
      } else if (now_ - p.arrived >= graph_.time().t_ct()) {
        throw InvariantError(describe(p) + " waited a full cycle time at " + graph_.node(port.node).id);
      }
      q.erase(q.begin());
      transmit(port, pid);
      return;
    }
    serve_best_effort(port, next_gate_open(port));
  }

  const NetworkGraph& graph_;
  const Workload& workload_;
  SimOptions options_;
  bool gated_;
  Nanos now_ = 0;
  Nanos traffic_end_ = 0;
  Nanos hard_stop_ = 0;
  std::uint64_t seq_ = 0;
  std::size_t in_flight_ = 0;  // scheduled packets
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<SimPacket> packets_;
  std::vector<Port> ports_;
  std::vector<InterferenceFlow> flows_;
  std::vector<MessageState> messages_;
  std::map<std::pair<NodeIndex, LinkIndex>, std::vector<CycleIndex>> core_;
  std::map<std::pair<NodeIndex, PacketKey>, IngressEntry> ingress_;
  std::map<std::pair<NodeIndex, PacketKey>, PifoEntry> pifo_;
  SimTrace trace_;
};

}  // namespace

SimTrace run(const NetworkGraph& graph, const Workload& workload, const Schedule& schedule,
             const DevicePrograms& programs, const InterferenceProfile& interference, const SimOptions& options) {
  if (schedule.apps.size() != workload.size()) throw ModelError("schedule does not match the workload");
  Engine engine(graph, workload, options, true);
  engine.load(programs);
  engine.add_interference(interference);
  for (std::size_t a = 0; a < schedule.apps.size(); ++a)
    if (schedule.apps[a].accepted) engine.add_app(a, *schedule.apps[a].route, Class::Scheduled);
  return engine.finish();
}

SimTrace run_best_effort(const NetworkGraph& graph, const Workload& workload,
                         const std::vector<std::optional<Route>>& routes, const InterferenceProfile& interference,
                         const SimOptions& options) {
  if (routes.size() != workload.size()) throw ModelError("one route slot per application expected");
  Engine engine(graph, workload, options, false);
  engine.add_interference(interference);
  for (std::size_t a = 0; a < routes.size(); ++a)
    if (routes[a]) engine.add_app(a, *routes[a], Class::AppBestEffort);
  return engine.finish();
}

std::vector<Nanos> message_delays(const SimTrace& trace, std::size_t app) {
  std::vector<Nanos> out;
  for (const auto& m : trace.messages)
    if (m.app == app && m.completion) out.push_back(*m.delay());
  return out;
}

Nanos measure_jitter(const std::vector<Nanos>& delays) {
  if (delays.size() < 2) throw ModelError("jitter needs at least two completed messages");
  const auto [lo, hi] = std::minmax_element(delays.begin(), delays.end());
  return *hi - *lo;
}

Nanos measure_jitter(const SimTrace& trace, std::size_t app) { return measure_jitter(message_delays(trace, app)); }

}  // namespace crossdet
