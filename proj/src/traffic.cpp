#include "crossdet/traffic.hpp"

#include <random>
#include <sstream>
#include <utility>

namespace crossdet {

int messages_per_cycle(const Application& app, const TimeConfig& time) {
  if (app.period <= 0 || time.t_ct() % app.period != 0)
    throw ModelError("application '" + app.id + "': period " + std::to_string(app.period) +
                     " ns does not divide the cycle time");
  return static_cast<int>(time.t_ct() / app.period);
}

int packets_per_message(const Application& app) {
  if (app.mtu <= 0) throw ModelError("application '" + app.id + "': mtu must be positive");
  return static_cast<int>(ceil_div(app.msg_len, app.mtu));
}

std::vector<Packet> fragment(const Application& app, const TimeConfig& time) {
  const int n_msg = messages_per_cycle(app, time);
  const int n_pkt = packets_per_message(app);
  std::vector<Packet> out;
  out.reserve(static_cast<std::size_t>(n_msg) * n_pkt);
  for (int i = 1; i <= n_msg; ++i) {
    std::int64_t left = app.msg_len;
    for (int j = 1; j <= n_pkt; ++j) {
      const std::int64_t len = std::min(left, app.mtu);
      out.push_back({i, j, len});
      left -= len;
    }
  }
  return out;
}

std::size_t AppTraffic::packet_slot(int msg, int pkt) const {
  return static_cast<std::size_t>(msg - 1) * packets_per_message + static_cast<std::size_t>(pkt - 1);
}

const Packet& AppTraffic::packet(int msg, int pkt) const { return packets.at(packet_slot(msg, pkt)); }

std::size_t Workload::packet_count() const {
  std::size_t n = 0;
  for (const auto& a : apps) n += a.packets.size();
  return n;
}

std::size_t Workload::find_app(std::string_view id) const {
  for (std::size_t i = 0; i < apps.size(); ++i)
    if (apps[i].app.id == id) return i;
  throw ModelError("unknown application '" + std::string(id) + "'");
}

namespace {

AppTraffic bind_app(const NetworkGraph& graph, Application app, Nanos first_offset) {
  if (app.id.empty()) throw ModelError("application with empty id");
  if (app.msg_len <= 0) throw ModelError("application '" + app.id + "': message length must be positive");
  if (app.e2e <= 0) throw ModelError("application '" + app.id + "': deadline must be positive");
  AppTraffic t;
  t.src = graph.node_index(app.src);
  t.dest = graph.node_index(app.dest);
  if (graph.node(t.src).kind != NodeKind::SourceHost)
    throw ModelError("application '" + app.id + "': src '" + app.src + "' is not a source host");
  if (graph.node(t.dest).kind != NodeKind::DestHost)
    throw ModelError("application '" + app.id + "': dest '" + app.dest + "' is not a destination host");
  const TimeConfig& time = graph.time();
  const int n_msg = messages_per_cycle(app, time);
  if (first_offset < 0 || first_offset >= time.t_ct())
    throw ModelError("application '" + app.id + "': message offset outside [0, t_ct)");
  for (int i = 1; i <= n_msg; ++i)
    t.messages.push_back({i, mod_floor(first_offset + (i - 1) * app.period, time.t_ct())});
  t.packets = fragment(app, time);
  t.packets_per_message = packets_per_message(app);
  t.app = std::move(app);
  return t;
}

void check_unique_ids(const Workload& w) {
  for (std::size_t i = 0; i < w.apps.size(); ++i)
    for (std::size_t j = i + 1; j < w.apps.size(); ++j)
      if (w.apps[i].app.id == w.apps[j].app.id) throw ModelError("duplicate application id '" + w.apps[i].app.id + "'");
}

}  // namespace

Workload make_workload(const NetworkGraph& graph, std::vector<Application> apps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Nanos> offsets;
  offsets.reserve(apps.size());
  for (const auto& a : apps) {
    if (a.period <= 0) throw ModelError("application '" + a.id + "': period must be positive");
    offsets.push_back(static_cast<Nanos>(rng() % static_cast<std::uint64_t>(a.period)));
  }
  return make_workload(graph, std::move(apps), offsets);
}

Workload make_workload(const NetworkGraph& graph, std::vector<Application> apps,
                       const std::vector<Nanos>& first_offsets) {
  if (first_offsets.size() != apps.size()) throw ModelError("one message offset per application required");
  Workload w;
  w.apps.reserve(apps.size());
  for (std::size_t i = 0; i < apps.size(); ++i) w.apps.push_back(bind_app(graph, std::move(apps[i]), first_offsets[i]));
  check_unique_ids(w);
  return w;
}

std::string to_string(const PacketKey& key, const Workload& workload) {
  std::ostringstream os;
  os << workload.apps.at(key.app).app.id << ':' << key.msg << ':' << key.pkt;
  return os.str();
}

}  // namespace crossdet
