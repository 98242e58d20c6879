#include "crossdet/experiments.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "crossdet/device_config.hpp"
#include "crossdet/validator.hpp"

namespace crossdet {

namespace {

constexpr int kRouters = 15;
constexpr int kEdge[] = {1, 3, 4, 6, 7, 9, 10, 12, 13, 15};
constexpr int kSourceAt[] = {1, 4, 7, 10, 13};
constexpr int kDestAt[] = {9, 12, 15, 3, 6};
constexpr std::pair<int, int> kCore[] = {{1, 2},   {1, 3},   {2, 3},   {2, 4},   {3, 5},   {4, 5},
                                         {4, 6},   {5, 7},   {6, 7},   {6, 8},   {7, 9},   {8, 9},
                                         {8, 10},  {9, 11},  {10, 11}, {10, 12}, {11, 13}, {12, 13},
                                         {12, 14}, {13, 15}, {14, 15}, {1, 15}};

std::string router(int i) { return "R" + std::to_string(i); }

}  // namespace

NetworkGraph backbone_graph(const BackboneOptions& o) {
  std::mt19937_64 rng(o.epoch_seed);
  auto epoch = [&]() -> Nanos { return o.epoch_seed == 0 ? 0 : static_cast<Nanos>(rng() % static_cast<std::uint64_t>(o.t_ct)); };
  std::vector<Node> nodes;
  std::vector<Link> links;
  auto both = [&](const std::string& a, const std::string& b, std::int64_t bw, Nanos d, int qa, int qb) {
    links.push_back({a, b, bw, d, qa});
    links.push_back({b, a, bw, d, qb});
  };
  for (int i = 1; i <= kRouters; ++i) {
    const bool edge = std::find(std::begin(kEdge), std::end(kEdge), i) != std::end(kEdge);
    nodes.push_back({router(i), edge ? NodeKind::DipEdgeRouter : NodeKind::DipRouter, epoch()});
  }
  for (auto [a, b] : kCore) both(router(a), router(b), o.core_bw, o.core_delay, o.dip_queues, o.dip_queues);
  auto access = [&](const std::string& host, NodeKind kind, const std::string& te, int at) {
    const Nanos e = epoch();
    nodes.push_back({te, NodeKind::TasEdgeSwitch, e});
    nodes.push_back({host, kind, e});
    both(host, te, o.access_bw, o.access_delay, 8, 8);
    both(te, router(at), o.attach_bw, o.attach_delay, 8, o.dip_queues);
  };
  for (int i = 0; i < 5; ++i) access("src" + std::to_string(i + 1), NodeKind::SourceHost, "te_s" + std::to_string(i + 1), kSourceAt[i]);
  for (int i = 0; i < 5; ++i) access("dst" + std::to_string(i + 1), NodeKind::DestHost, "te_d" + std::to_string(i + 1), kDestAt[i]);
  return build_graph(std::move(nodes), std::move(links), TimeConfig(o.t_ct, o.t_dip));
}

std::vector<Application> generate_load(const NetworkGraph& graph, double load_bps, const LoadSpec& spec,
                                       std::uint64_t seed) {
  if (load_bps < 0) throw ModelError("load must be non-negative");
  const auto sources = graph.nodes_of_kind(NodeKind::SourceHost);
  const auto dests = graph.nodes_of_kind(NodeKind::DestHost);
  if (load_bps > 0 && dests.empty()) throw ModelError("no destination hosts");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::vector<Application> out;
  for (NodeIndex s : sources) {
    double offered = 0;
    int n = 0;
    while (offered < load_bps) {
      Application a;
      a.id = graph.node(s).id + "_a" + std::to_string(++n);
      a.src = graph.node(s).id;
      a.dest = graph.node(dests[pick(dests.size())]).id;
      a.period = spec.periods[pick(spec.periods.size())];
      a.msg_len = kDefaultMtu * spec.msg_mtus[pick(spec.msg_mtus.size())];
      a.e2e = spec.e2e;
      offered += static_cast<double>(a.msg_len) * 8e9 / static_cast<double>(a.period);
      out.push_back(std::move(a));
    }
  }
  return out;
}

Scenario backbone_scenario(const BackboneOptions& options, int per_source, std::uint64_t seed) {
  Scenario s{backbone_graph(options), {}, std::nullopt, seed, {}, {}, {}};
  std::mt19937_64 rng(seed);
  const auto dests = s.graph.nodes_of_kind(NodeKind::DestHost);
  for (NodeIndex src : s.graph.nodes_of_kind(NodeKind::SourceHost))
    for (int i = 1; i <= per_source; ++i) {
      Application a;
      a.id = s.graph.node(src).id + "_a" + std::to_string(i);
      a.src = s.graph.node(src).id;
      a.dest = s.graph.node(dests[rng() % dests.size()]).id;
      a.period = options.t_ct;
      a.msg_len = kDefaultMtu * static_cast<std::int64_t>(1 + rng() % 2);
      a.e2e = options.t_ct;
      s.applications.push_back(std::move(a));
    }
  return s;
}

std::vector<LinkIndex> interference_links(const NetworkGraph& graph, const Schedule& schedule,
                                          InterferenceScope scope) {
  std::set<LinkIndex> out;
  if (scope == InterferenceScope::All) {
    for (LinkIndex l = 0; l < graph.link_count(); ++l) out.insert(l);
  } else {
    for (const auto& as : schedule.apps)
      if (as.accepted) out.insert(as.route->links.begin(), as.route->links.end());
  }
  return {out.begin(), out.end()};
}

std::vector<std::optional<Route>> scheduled_routes(const Schedule& schedule) {
  std::vector<std::optional<Route>> out;
  for (const auto& as : schedule.apps) out.push_back(as.accepted ? as.route : std::nullopt);
  return out;
}

std::vector<LoadPoint> sweep_load(const NetworkGraph& graph, const std::vector<double>& loads_bps,
                                  const LoadSpec& spec, const SolverConfig& base, std::uint64_t seed) {
  std::vector<LoadPoint> out;
  for (double load : loads_bps) {
    const Workload w = make_workload(graph, generate_load(graph, load, spec, seed), seed);
    LoadPoint p;
    p.load_bps = load;
    p.apps = w.size();
    auto ratio = [&](Policy policy) {
      if (w.size() == 0) return 1.0;
      SolverConfig c = base;
      c.policy = policy;
      c.initial.clear();
      const Schedule s = solve(graph, w, c);
      if (!validate(s, graph, w).feasible()) throw InvariantError("solver returned an infeasible schedule");
      return static_cast<double>(s.accepted_count()) / static_cast<double>(w.size());
    };
    p.full = ratio(Policy::Full);
    p.no_shaping = ratio(Policy::NoShaping);
    p.no_route = ratio(Policy::NoRouteSelection);
    out.push_back(p);
  }
  return out;
}

UtilizationSweep sweep_utilization(const Scenario& scenario, const std::vector<double>& levels) {
  const NetworkGraph& g = scenario.graph;
  const Workload w = scenario.workload();
  UtilizationSweep out;
  out.schedule = solve(g, w, scenario.solver);
  if (!validate(out.schedule, g, w).feasible()) throw InvariantError("solver returned an infeasible schedule");
  const DevicePrograms programs = compile_all(out.schedule, g, w);
  for (std::size_t a = 0; a < out.schedule.apps.size() && !out.probe; ++a)
    if (out.schedule.apps[a].accepted) out.probe = a;
  const auto links = interference_links(g, out.schedule, scenario.simulation.scope);
  const auto routes = scheduled_routes(out.schedule);
  SimOptions opt;
  opt.horizon = scenario.simulation.horizon;
  for (double u : levels) {
    const InterferenceProfile noise = uniform_interference(g, links, u, scenario.seed, scenario.simulation.flows_per_link,
                                                           scenario.simulation.packet_bytes);
    const SimTrace gated = run(g, w, out.schedule, programs, noise, opt);
    const SimTrace plain = run_best_effort(g, w, routes, noise, opt);
    UtilizationPoint p;
    p.utilization = u;
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (!out.schedule.apps[a].accepted) continue;
      const auto sd = message_delays(gated, a);
      const auto bd = message_delays(plain, a);
      if (sd.size() >= 2) p.scheduled_jitter = std::max(p.scheduled_jitter, measure_jitter(sd));
      if (bd.size() >= 2) p.best_effort_jitter = std::max(p.best_effort_jitter, measure_jitter(bd));
      if (out.probe == a) {
        p.scheduled_delays = sd;
        p.best_effort_delays = bd;
      }
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

}  // namespace crossdet
