#include "crossdet/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace crossdet {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

// A JSON object being read, with the path used in error messages.
class Reader {
 public:
  Reader(const json& value, std::string path) : j_(value), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ModelError(path_ + ": " + what); }
  std::string at(std::string_view key) const { return path_ + "." + std::string(key); }

  void only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail("unknown field '" + k + "'");
  }

  bool has(std::string_view key) const { return j_.contains(key) && !j_.at(std::string(key)).is_null(); }

  const json& raw(std::string_view key) const {
    if (!j_.contains(key)) fail("missing field '" + std::string(key) + "'");
    return j_.at(std::string(key));
  }

  std::int64_t integer(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ModelError(at(key) + ": expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
      throw ModelError(at(key) + ": out of range");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(std::string_view key, std::int64_t fallback) const { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned_integer(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ModelError(at(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  double number(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ModelError(at(key) + ": expected a number");
    return v.get<double>();
  }

  std::string string(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_string()) throw ModelError(at(key) + ": expected a string");
    return v.get<std::string>();
  }

  const json& array(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_array()) throw ModelError(at(key) + ": expected an array");
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Prefixes errors raised by model code with the field they came from.
template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

json parse_text(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.rfind(": ");
    if (pos != std::string::npos) what = what.substr(pos + 2);
    throw ModelError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

std::vector<Nanos> integer_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ModelError(path + ": expected an array");
  std::vector<Nanos> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) throw ModelError(item(path, i) + ": expected an integer");
    out.push_back(v[i].get<Nanos>());
  }
  return out;
}

SolverConfig read_solver(const json& v, const std::string& path) {
  Reader r(v, path);
  r.only({"mode", "policy", "offset_granularity_ns", "k_routes", "time_budget_s", "exhaustive_max_apps",
          "exhaustive_max_log10_space", "genetic"});
  SolverConfig c;
  if (r.has("mode")) {
    const std::string mode = r.string("mode");
    c.mode = with_path(r.at("mode"), [&] { return parse_solver_mode(mode); });
  }
  if (r.has("policy")) {
    const std::string policy = r.string("policy");
    c.policy = with_path(r.at("policy"), [&] { return parse_policy(policy); });
  }
  c.offset_granularity = r.integer("offset_granularity_ns", 0);
  c.k_routes = static_cast<int>(r.integer("k_routes", c.k_routes));
  c.time_budget_s = r.number("time_budget_s", c.time_budget_s);
  c.exhaustive_max_apps = static_cast<std::size_t>(r.integer("exhaustive_max_apps", 8));
  c.exhaustive_max_log10_space = r.number("exhaustive_max_log10_space", c.exhaustive_max_log10_space);
  if (c.time_budget_s <= 0) throw ModelError(r.at("time_budget_s") + ": must be positive");
  if (r.has("genetic")) {
    Reader g(r.raw("genetic"), r.at("genetic"));
    g.only({"population", "generations", "mutation_rate", "crossover_rate", "seed"});
    c.ga.population = static_cast<int>(g.integer("population", c.ga.population));
    c.ga.generations = static_cast<int>(g.integer("generations", c.ga.generations));
    c.ga.mutation_rate = g.number("mutation_rate", c.ga.mutation_rate);
    c.ga.crossover_rate = g.number("crossover_rate", c.ga.crossover_rate);
    if (g.has("seed")) c.ga.seed = g.unsigned_integer("seed");
    if (c.ga.population < 2) throw ModelError(g.at("population") + ": at least 2");
    if (c.ga.generations < 0) throw ModelError(g.at("generations") + ": must be non-negative");
    if (c.ga.mutation_rate < 0 || c.ga.mutation_rate > 1) throw ModelError(g.at("mutation_rate") + ": not in [0, 1]");
    if (c.ga.crossover_rate < 0 || c.ga.crossover_rate > 1) throw ModelError(g.at("crossover_rate") + ": not in [0, 1]");
  }
  return c;
}

SimulationSpec read_simulation(const json& v, const std::string& path) {
  Reader r(v, path);
  r.only({"horizon", "utilization", "flows_per_link", "packet_bytes", "interference"});
  SimulationSpec s;
  s.horizon = static_cast<int>(r.integer("horizon", s.horizon));
  s.utilization = r.number("utilization", s.utilization);
  s.flows_per_link = static_cast<int>(r.integer("flows_per_link", s.flows_per_link));
  s.packet_bytes = r.integer("packet_bytes", s.packet_bytes);
  if (r.has("interference")) {
    const std::string scope = r.string("interference");
    if (scope == "routes") s.scope = InterferenceScope::Routes;
    else if (scope == "all") s.scope = InterferenceScope::All;
    else throw ModelError(r.at("interference") + ": expected \"routes\" or \"all\"");
  }
  if (s.horizon < 1) throw ModelError(r.at("horizon") + ": at least 1");
  if (s.utilization < 0) throw ModelError(r.at("utilization") + ": must be non-negative");
  if (s.flows_per_link < 1) throw ModelError(r.at("flows_per_link") + ": at least 1");
  if (s.packet_bytes < 1) throw ModelError(r.at("packet_bytes") + ": must be positive");
  return s;
}

LoadSpec read_load(const json& v, const std::string& path) {
  Reader r(v, path);
  r.only({"periods_ns", "msg_mtus", "e2e_ns"});
  LoadSpec s;
  if (r.has("periods_ns")) s.periods = integer_list(r.raw("periods_ns"), r.at("periods_ns"));
  if (r.has("msg_mtus")) {
    s.msg_mtus.clear();
    for (Nanos m : integer_list(r.raw("msg_mtus"), r.at("msg_mtus"))) s.msg_mtus.push_back(static_cast<int>(m));
  }
  s.e2e = r.integer("e2e_ns", s.e2e);
  if (s.periods.empty() || s.msg_mtus.empty()) throw ModelError(path + ": periods and sizes must be non-empty");
  for (Nanos p : s.periods)
    if (p <= 0) throw ModelError(r.at("periods_ns") + ": periods must be positive");
  for (int m : s.msg_mtus)
    if (m < 1) throw ModelError(r.at("msg_mtus") + ": sizes must be at least 1");
  if (s.e2e <= 0) throw ModelError(r.at("e2e_ns") + ": must be positive");
  return s;
}

std::string link_name(const NetworkGraph& g, LinkIndex l) { return g.link(l).src + "->" + g.link(l).dst; }

std::string packet_name(const PacketKey& k, const Workload& w) {
  return w.apps.at(k.app).app.id + ":" + std::to_string(k.msg) + ":" + std::to_string(k.pkt);
}

template <class T>
ordered optional_value(const std::optional<T>& v) {
  return v ? ordered(*v) : ordered(nullptr);
}

}  // namespace

Workload Scenario::workload() const {
  if (first_offsets) return make_workload(graph, applications, *first_offsets);
  return make_workload(graph, applications, seed);
}

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  const json doc = parse_text(text, origin);
  Reader top(doc, origin);
  top.only({"time", "nodes", "links", "applications", "seed", "mtu_bytes", "solver", "simulation", "load"});

  Reader tr(top.raw("time"), top.at("time"));
  tr.only({"t_ct_ns", "t_dip_ns"});
  const Nanos t_ct = tr.integer("t_ct_ns");
  const Nanos t_dip = tr.integer("t_dip_ns");
  const TimeConfig time = with_path(top.at("time"), [&] { return TimeConfig(t_ct, t_dip); });

  std::vector<Node> nodes;
  const json& jn = top.array("nodes");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string path = item(top.at("nodes"), i);
    Reader r(jn[i], path);
    r.only({"id", "kind", "epoch_ns"});
    Node n;
    n.id = r.string("id");
    const std::string kind = r.string("kind");
    n.kind = with_path(r.at("kind"), [&] { return parse_node_kind(kind); });
    n.epoch = r.integer("epoch_ns", 0);
    nodes.push_back(std::move(n));
  }

  std::vector<Link> links;
  const json& jl = top.array("links");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string path = item(top.at("links"), i);
    Reader r(jl[i], path);
    r.only({"src", "dst", "bw_bps", "delay_ns", "queues"});
    Link l;
    l.src = r.string("src");
    l.dst = r.string("dst");
    l.bw_bps = r.integer("bw_bps");
    l.delay = r.integer("delay_ns");
    l.queues = static_cast<int>(r.integer("queues", 8));
    links.push_back(std::move(l));
  }

  const std::int64_t mtu = top.integer("mtu_bytes", kDefaultMtu);
  if (mtu < 1) throw ModelError(top.at("mtu_bytes") + ": must be positive");

  std::vector<Application> apps;
  std::vector<Nanos> offsets;
  const json& ja = top.array("applications");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const std::string path = item(top.at("applications"), i);
    Reader r(ja[i], path);
    r.only({"id", "src", "dest", "e2e_ns", "msg_len_bytes", "period_ns", "offset_ns"});
    Application a;
    a.id = r.string("id");
    a.src = r.string("src");
    a.dest = r.string("dest");
    a.e2e = r.integer("e2e_ns");
    a.msg_len = r.integer("msg_len_bytes");
    a.period = r.integer("period_ns");
    a.mtu = mtu;
    if (r.has("offset_ns")) {
      if (offsets.size() != i) throw ModelError(r.at("offset_ns") + ": give offsets for all applications or none");
      offsets.push_back(r.integer("offset_ns"));
    } else if (!offsets.empty()) {
      throw ModelError(path + ": give offsets for all applications or none");
    }
    apps.push_back(std::move(a));
  }

  Scenario s{with_path(origin, [&] { return build_graph(std::move(nodes), std::move(links), time); }),
             std::move(apps), std::nullopt, 0, {}, {}, {}};
  if (!offsets.empty()) s.first_offsets = std::move(offsets);
  if (top.has("seed")) s.seed = top.unsigned_integer("seed");
  if (top.has("solver")) s.solver = read_solver(top.raw("solver"), top.at("solver"));
  if (top.has("simulation")) s.simulation = read_simulation(top.raw("simulation"), top.at("simulation"));
  if (top.has("load")) s.load = read_load(top.raw("load"), top.at("load"));
  with_path(origin, [&] {
    check_config(s.solver, s.graph.time());
    return s.workload();
  });
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path), path.string()); }

std::string scenario_to_json(const Scenario& s) {
  const NetworkGraph& g = s.graph;
  ordered doc;
  doc["time"] = {{"t_ct_ns", g.time().t_ct()}, {"t_dip_ns", g.time().t_dip()}};
  doc["nodes"] = ordered::array();
  for (const Node& n : g.nodes())
    doc["nodes"].push_back({{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"epoch_ns", n.epoch}});
  doc["links"] = ordered::array();
  for (const Link& l : g.links())
    doc["links"].push_back(
        {{"src", l.src}, {"dst", l.dst}, {"bw_bps", l.bw_bps}, {"delay_ns", l.delay}, {"queues", l.queues}});
  doc["applications"] = ordered::array();
  for (std::size_t i = 0; i < s.applications.size(); ++i) {
    const Application& a = s.applications[i];
    ordered ja = {{"id", a.id},           {"src", a.src},           {"dest", a.dest},
                  {"e2e_ns", a.e2e},      {"msg_len_bytes", a.msg_len}, {"period_ns", a.period}};
    if (s.first_offsets) ja["offset_ns"] = (*s.first_offsets)[i];
    doc["applications"].push_back(ja);
  }
  if (!s.applications.empty() && s.applications.front().mtu != kDefaultMtu) doc["mtu_bytes"] = s.applications.front().mtu;
  doc["seed"] = s.seed;
  const SolverConfig& c = s.solver;
  doc["solver"] = {{"mode", std::string(to_string(c.mode))},
                   {"policy", std::string(to_string(c.policy))},
                   {"offset_granularity_ns", c.offset_granularity},
                   {"k_routes", c.k_routes},
                   {"time_budget_s", c.time_budget_s},
                   {"exhaustive_max_apps", c.exhaustive_max_apps},
                   {"exhaustive_max_log10_space", c.exhaustive_max_log10_space},
                   {"genetic",
                    {{"population", c.ga.population},
                     {"generations", c.ga.generations},
                     {"mutation_rate", c.ga.mutation_rate},
                     {"crossover_rate", c.ga.crossover_rate},
                     {"seed", c.ga.seed}}}};
  const SimulationSpec& sim = s.simulation;
  doc["simulation"] = {{"horizon", sim.horizon},
                       {"utilization", sim.utilization},
                       {"flows_per_link", sim.flows_per_link},
                       {"packet_bytes", sim.packet_bytes},
                       {"interference", sim.scope == InterferenceScope::All ? "all" : "routes"}};
  doc["load"] = {{"periods_ns", s.load.periods}, {"msg_mtus", s.load.msg_mtus}, {"e2e_ns", s.load.e2e}};
  return doc.dump(2) + "\n";
}

std::string schedule_to_json(const Schedule& schedule, const NetworkGraph& graph, const Workload& workload) {
  if (schedule.apps.size() != workload.size()) throw ModelError("schedule does not match the workload");
  ordered doc;
  doc["applications"] = ordered::array();
  doc["admission"] = ordered::array();
  doc["routes"] = ordered::array();
  doc["src_offsets_ns"] = ordered::array();
  doc["cycle_shifts"] = ordered::array();
  doc["extra_delays_ns"] = ordered::array();
  for (std::size_t a = 0; a < schedule.apps.size(); ++a) {
    const AppAssignment& as = schedule.apps[a];
    doc["applications"].push_back(workload.apps[a].app.id);
    doc["admission"].push_back(as.accepted);
    if (as.route) {
      ordered r = ordered::array();
      for (NodeIndex v : as.route->nodes) r.push_back(graph.node(v).id);
      doc["routes"].push_back(r);
    } else {
      doc["routes"].push_back(nullptr);
    }
    ordered src = ordered::array(), shift = ordered::array(), extra = ordered::array();
    for (const PacketVars& v : as.packets) {
      src.push_back(optional_value(v.src_offset));
      shift.push_back(optional_value(v.cycle_shift));
      extra.push_back(optional_value(v.extra_delay));
    }
    doc["src_offsets_ns"].push_back(src);
    doc["cycle_shifts"].push_back(shift);
    doc["extra_delays_ns"].push_back(extra);
  }
  doc["accepted"] = schedule.accepted_count();
  doc["budget_exhausted"] = schedule.budget_exhausted;
  return doc.dump(2) + "\n";
}

Schedule schedule_from_json(std::string_view text, const NetworkGraph& graph, const Workload& workload) {
  const json doc = parse_text(text, "schedule");
  Reader top(doc, "schedule");
  top.only({"applications", "admission", "routes", "src_offsets_ns", "cycle_shifts", "extra_delays_ns", "accepted",
            "budget_exhausted"});
  const std::size_t n = workload.size();
  const json& ids = top.array("applications");
  const json& adm = top.array("admission");
  const json& routes = top.array("routes");
  const json& src = top.array("src_offsets_ns");
  const json& shift = top.array("cycle_shifts");
  const json& extra = top.array("extra_delays_ns");
  for (const json* a : {&ids, &adm, &routes, &src, &shift, &extra})
    if (a->size() != n) throw ModelError("schedule: expected " + std::to_string(n) + " entries per array");
  Schedule s = Schedule::empty_for(workload);
  if (top.has("budget_exhausted")) s.budget_exhausted = top.raw("budget_exhausted").get<bool>();
  for (std::size_t a = 0; a < n; ++a) {
    const std::string where = "schedule.applications[" + std::to_string(a) + "]";
    if (!ids[a].is_string() || ids[a].get<std::string>() != workload.apps[a].app.id)
      throw ModelError(where + ": expected '" + workload.apps[a].app.id + "'");
    if (!adm[a].is_boolean()) throw ModelError("schedule.admission[" + std::to_string(a) + "]: expected a boolean");
    AppAssignment& as = s.apps[a];
    as.accepted = adm[a].get<bool>();
    if (!routes[a].is_null()) {
      std::vector<std::string> path;
      for (const json& v : routes[a]) {
        if (!v.is_string()) throw ModelError("schedule.routes[" + std::to_string(a) + "]: expected node ids");
        path.push_back(v.get<std::string>());
      }
      as.route = with_path("schedule.routes[" + std::to_string(a) + "]", [&] { return make_route(graph, path); });
    }
    const std::size_t packets = workload.apps[a].packets.size();
    for (const json* arr : {&src[a], &shift[a], &extra[a]})
      if (!arr->is_array() || arr->size() != packets)
        throw ModelError(where + ": expected " + std::to_string(packets) + " packet values");
    for (std::size_t p = 0; p < packets; ++p) {
      PacketVars& v = as.packets[p];
      auto get = [&](const json& x, const char* what) -> std::optional<std::int64_t> {
        if (x.is_null()) return std::nullopt;
        if (!x.is_number_integer()) throw ModelError(where + ": " + what + " must be integers or null");
        return x.get<std::int64_t>();
      };
      v.src_offset = get(src[a][p], "source offsets");
      if (auto r = get(shift[a][p], "cycle shifts")) v.cycle_shift = static_cast<int>(*r);
      v.extra_delay = get(extra[a][p], "extra delays");
    }
  }
  return s;
}

std::string report_to_json(const ViolationReport& report, const NetworkGraph& graph, const Workload& workload) {
  ordered doc;
  doc["feasible"] = report.feasible();
  doc["counts"] = ordered::object();
  for (ViolationKind k : {ViolationKind::Conflict, ViolationKind::Capacity, ViolationKind::Deadline, ViolationKind::Domain})
    doc["counts"][std::string(to_string(k))] = report.count(k);
  doc["violations"] = ordered::array();
  for (const Violation& v : report.violations) {
    ordered jv;
    jv["kind"] = std::string(to_string(v.kind));
    jv["apps"] = ordered::array();
    for (std::size_t a : v.apps) jv["apps"].push_back(workload.apps.at(a).app.id);
    jv["packets"] = ordered::array();
    for (const PacketKey& k : v.packets) jv["packets"].push_back(packet_name(k, workload));
    jv["link"] = v.link ? ordered(link_name(graph, *v.link)) : ordered(nullptr);
    jv["cycle"] = optional_value(v.cycle);
    jv["slack"] = v.slack;
    jv["detail"] = v.detail;
    doc["violations"].push_back(jv);
  }
  return doc.dump(2) + "\n";
}

std::string programs_to_json(const DevicePrograms& programs, const NetworkGraph& graph, const Workload& workload) {
  ordered nodes = ordered::object();
  auto slot = [&](const std::string& id) -> ordered& {
    if (!nodes.contains(id)) nodes[id] = {{"gcl", ordered::array()}, {"dip_table", nullptr}, {"pifo", ordered::array()}};
    return nodes[id];
  };
  for (const auto& g : programs.gcls) {
    ordered entries = ordered::array();
    for (const auto& e : g.entries)
      entries.push_back({{"offset_ns", e.offset},
                         {"duration_ns", e.duration},
                         {"gate_states", e.gate_states},
                         {"queue", e.queue},
                         {"packet", packet_name(e.packet, workload)}});
    slot(g.node)["gcl"].push_back({{"port", link_name(graph, g.port)}, {"cycle_ns", g.cycle}, {"entries", entries}});
  }
  for (const auto& t : programs.dip_tables) {
    ordered core = ordered::array();
    for (const auto& m : t.core) core.push_back({{"in_link", link_name(graph, m.in_link)}, {"next", m.next}});
    ordered ingress = ordered::array();
    for (const auto& e : t.ingress)
      ingress.push_back({{"packet", packet_name(e.packet, workload)},
                         {"in_link", link_name(graph, e.in_link)},
                         {"out_link", link_name(graph, e.out_link)},
                         {"arrival_cycle", e.arrival_cycle},
                         {"shift", e.shift},
                         {"out_cycle", e.out_cycle},
                         {"queue_advance", e.queue_advance}});
    slot(t.node)["dip_table"] = {{"core", core}, {"ingress", ingress}};
  }
  for (const auto& p : programs.pifos)
    for (const auto& e : p.entries)
      slot(p.node)["pifo"].push_back({{"packet", packet_name(e.packet, workload)},
                                      {"port", link_name(graph, e.port)},
                                      {"arrival_bound_ns", e.arrival_bound},
                                      {"extra_delay_ns", e.extra_delay},
                                      {"rank_ns", e.rank}});
  ordered doc;
  doc["nodes"] = nodes;
  return doc.dump(2) + "\n";
}

void write_trace_csv(std::ostream& out, const SimTrace& trace, const NetworkGraph& graph, const Workload& workload) {
  out << "app_id,msg_index,pkt_index,node,arrival_ns,departure_ns\n";
  for (const HopRecord& r : trace.hops)
    out << workload.apps.at(r.app).app.id << ',' << r.msg_index << ',' << r.pkt << ',' << graph.node(r.node).id << ','
        << r.arrival << ',' << r.departure << '\n';
}

void write_summary_csv(std::ostream& out, const SimTrace& trace, const Workload& workload) {
  out << "app_id,n_messages,min_delay_ns,max_delay_ns,jitter_ns\n";
  for (std::size_t a = 0; a < workload.size(); ++a) {
    const std::vector<Nanos> d = message_delays(trace, a);
    if (d.empty()) continue;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    out << workload.apps[a].app.id << ',' << d.size() << ',' << *lo << ',' << *hi << ',';
    if (d.size() >= 2) out << (*hi - *lo);
    out << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write " + path.string());
  out << content;
  if (!out) throw ModelError("cannot write " + path.string());
}

}  // namespace crossdet
