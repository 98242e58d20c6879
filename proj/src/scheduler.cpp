#include "crossdet/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <tuple>

#include "crossdet/cycle_map.hpp"
#include "placement.hpp"

namespace crossdet {

using detail::Footprint;
using detail::Occupancy;

std::string_view to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Exhaustive: return "exhaustive";
    case SolverMode::Greedy: return "greedy";
    case SolverMode::Genetic: return "genetic";
  }
  return "?";
}

SolverMode parse_solver_mode(std::string_view text) {
  if (text == "exhaustive") return SolverMode::Exhaustive;
  if (text == "greedy") return SolverMode::Greedy;
  if (text == "genetic") return SolverMode::Genetic;
  throw ModelError("unknown solver mode '" + std::string(text) + "'");
}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::Full: return "full";
    case Policy::NoShaping: return "no-shaping";
    case Policy::NoRouteSelection: return "no-route";
  }
  return "?";
}

Policy parse_policy(std::string_view text) {
  if (text == "full") return Policy::Full;
  if (text == "no-shaping") return Policy::NoShaping;
  if (text == "no-route") return Policy::NoRouteSelection;
  throw ModelError("unknown policy '" + std::string(text) + "'");
}

Nanos effective_granularity(const SolverConfig& config, const TimeConfig& time) {
  return config.offset_granularity > 0 ? config.offset_granularity : time.t_dip();
}

void check_config(const SolverConfig& config, const TimeConfig& time) {
  if (config.offset_granularity < 0) throw ModelError("offset granularity must be positive");
  if (time.t_dip() % effective_granularity(config, time) != 0)
    throw ModelError("offset granularity must divide t_dip");
  if (config.k_routes < 1) throw ModelError("k_routes must be at least 1");
  if (config.ga.population < 2) throw ModelError("genetic population must be at least 2");
  if (config.ga.generations < 0) throw ModelError("genetic generations must be non-negative");
  if (config.ga.mutation_rate < 0 || config.ga.mutation_rate > 1 || config.ga.crossover_rate < 0 ||
      config.ga.crossover_rate > 1)
    throw ModelError("genetic rates must lie in [0, 1]");
  if (!(config.time_budget_s > 0)) throw ModelError("time budget must be positive");
}

SearchSpaceTooLarge::SearchSpaceTooLarge(double log10_size, std::size_t apps)
    : ModelError("exhaustive search space too large: about 10^" + std::to_string(static_cast<int>(std::ceil(log10_size))) +
                 " assignments over " + std::to_string(apps) + " applications"),
      log10_size_(log10_size) {}

// ---------------------------------------------------------------------------
// Routes

std::vector<Route> enumerate_routes(const NetworkGraph& graph, NodeIndex src, NodeIndex dest, int k) {
  const std::size_t n = graph.node_count();
  if (src >= n || dest >= n) throw ModelError("route endpoint out of range");
  // hop distance to dest, for pruning
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kFar);
  std::vector<std::vector<NodeIndex>> preds(n);
  for (LinkIndex l = 0; l < graph.link_count(); ++l) preds[graph.link_dst(l)].push_back(graph.link_src(l));
  std::deque<NodeIndex> queue{dest};
  dist[dest] = 0;
  while (!queue.empty()) {
    const NodeIndex v = queue.front();
    queue.pop_front();
    for (NodeIndex u : preds[v])
      if (dist[u] == kFar) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  if (dist[src] == kFar || k < 1) return {};

  const auto is_host = [&](NodeIndex v) {
    const NodeKind kind = graph.node(v).kind;
    return kind == NodeKind::SourceHost || kind == NodeKind::DestHost;
  };
  std::vector<std::vector<NodeIndex>> found;
  std::vector<NodeIndex> path{src};
  std::vector<bool> on(n, false);
  on[src] = true;
  // stage: 0 before the DIP segment, 1 inside it, 2 after it
  const auto dfs = [&](auto&& self, NodeIndex at, std::size_t budget, int stage) -> void {
    if (at == dest) {
      if (!route_structure_error(graph, path)) found.push_back(path);
      return;
    }
    if (budget == 0) return;
    for (LinkIndex l : graph.out_links(at)) {
      const NodeIndex next = graph.link_dst(l);
      if (on[next] || dist[next] == kFar || dist[next] > budget - 1) continue;
      if (is_host(next) && next != dest) continue;
      const bool dip = is_dip(graph.node(next).kind);
      int next_stage = stage;
      if (dip && stage == 2) continue;
      if (dip) next_stage = 1;
      if (!dip && stage == 1) next_stage = 2;
      on[next] = true;
      path.push_back(next);
      self(self, next, budget - 1, next_stage);
      path.pop_back();
      on[next] = false;
    }
  };
  // Deepen the hop limit until k paths exist; all shorter paths are then known.
  for (std::size_t limit = dist[src]; limit < n && found.size() < static_cast<std::size_t>(k); ++limit) {
    found.clear();
    dfs(dfs, src, limit, 0);
  }

  const auto key = [&](const std::vector<NodeIndex>& p) {
    Nanos delay = 0;
    for (std::size_t a = 0; a + 1 < p.size(); ++a) delay += graph.link(*graph.find_link(p[a], p[a + 1])).delay;
    std::vector<std::string_view> ids;
    for (NodeIndex v : p) ids.push_back(graph.node(v).id);
    return std::make_tuple(p.size(), delay, ids);
  };
  std::vector<std::pair<decltype(key(path)), std::vector<NodeIndex>>> keyed;
  for (auto& p : found) keyed.emplace_back(key(p), std::move(p));
  std::sort(keyed.begin(), keyed.end());
  std::vector<Route> routes;
  for (auto& [unused, p] : keyed) {
    if (routes.size() == static_cast<std::size_t>(k)) break;
    routes.push_back(make_route(graph, std::move(p)));
  }
  return routes;
}

CandidateRoutes candidate_routes(const NetworkGraph& graph, const Workload& workload, int k) {
  CandidateRoutes out;
  out.reserve(workload.size());
  for (const AppTraffic& at : workload.apps) out.push_back(enumerate_routes(graph, at.src, at.dest, k));
  return out;
}

// ---------------------------------------------------------------------------
// Shared solver machinery

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
  const NetworkGraph& graph;
  const Workload& workload;
  const SolverConfig& config;
  Nanos grid;
  CandidateRoutes routes;
  Clock::time_point deadline;
  bool out_of_time = false;

  Context(const NetworkGraph& g, const Workload& w, const SolverConfig& c)
      : graph(g),
        workload(w),
        config(c),
        grid(effective_granularity(c, g.time())),
        routes(candidate_routes(g, w, c.policy == Policy::NoRouteSelection ? 1 : c.k_routes)),
        deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(c.time_budget_s))) {}

  bool expired() {
    if (!out_of_time && Clock::now() > deadline) out_of_time = true;
    return out_of_time;
  }
};

struct Placed {
  PacketVars vars;
  Footprint fp;
};

PacketVars make_vars(Nanos src, const Route& route, int r, Nanos extra) {
  PacketVars v;
  v.src_offset = src;
  if (route.has_dip_segment()) {
    v.cycle_shift = r;
    v.extra_delay = extra;
  }
  return v;
}

/// Grid source offsets that leave room for the first transmission, by
/// increasing wait after the message arrival.
std::vector<Nanos> source_offsets(const Context& ctx, Nanos tx0, Nanos msg_offset) {
  const Nanos t_ct = ctx.graph.time().t_ct();
  std::vector<Nanos> out;
  for (Nanos s = 0; s <= t_ct - tx0; s += ctx.grid) out.push_back(s);
  std::stable_sort(out.begin(), out.end(), [&](Nanos a, Nanos b) {
    return mod_floor(a - msg_offset, t_ct) < mod_floor(b - msg_offset, t_ct);
  });
  return out;
}

Footprint time_packet(const Context& ctx, const Route& route, Nanos msg_offset, std::int64_t len,
                      const PacketVars& vars) {
  return detail::footprint(ctx.graph, route, predict_timeline(ctx.graph, route, msg_offset, len, vars), len);
}

/// First fit for one packet: offsets by increasing wait, then shifts, then extra delays.
std::optional<Placed> first_fit(Context& ctx, const Occupancy& occ, const AppTraffic& at, const Route& route,
                                const Packet& pkt) {
  if (!detail::core_queues_suffice(ctx.graph, route, pkt.len)) return std::nullopt;
  const Nanos t_ct = ctx.graph.time().t_ct();
  const Nanos msg = at.message(pkt.msg).arrival_offset;
  const Nanos e2e = at.app.e2e;
  const Nanos tx0 = ctx.graph.tx_time(route.links[0], pkt.len);
  const int r_max = detail::max_cycle_shift(ctx.graph, route);
  for (Nanos src : source_offsets(ctx, tx0, msg)) {
    if (mod_floor(src - msg, t_ct) > e2e) break;
    PacketVars base = make_vars(src, route, 0, 0);
    Footprint fp = time_packet(ctx, route, msg, pkt.len, base);
    if (!occ.windows_fit(fp, 0, fp.ingress_windows)) continue;
    if (!route.has_dip_segment()) {
      if (fp.delay <= e2e) return Placed{base, std::move(fp)};
      continue;
    }
    for (int r = 0; r <= r_max; ++r) {
      PacketVars shifted = make_vars(src, route, r, 0);
      Footprint fr = time_packet(ctx, route, msg, pkt.len, shifted);
      if (fr.delay > e2e) break;
      if (!occ.loads_fit(fr)) continue;
      for (Nanos extra = 0; extra < t_ct; extra += ctx.grid) {
        PacketVars full = make_vars(src, route, r, extra);
        Footprint fe = extra == 0 ? fr : time_packet(ctx, route, msg, pkt.len, full);
        if (fe.delay > e2e) break;
        if (occ.windows_fit(fe, fe.ingress_windows, fe.windows.size())) return Placed{full, std::move(fe)};
      }
    }
    if (ctx.expired()) break;
  }
  return std::nullopt;
}

struct AppPlacement {
  AppAssignment assignment;
  std::vector<Footprint> footprints;
};

void withdraw(Occupancy& occ, const std::vector<Footprint>& fps) {
  for (const auto& fp : fps) occ.remove(fp);
}

/// Tries each candidate route in turn; leaves the occupancy untouched on failure.
std::optional<AppPlacement> place_first_fit(Context& ctx, Occupancy& occ, std::size_t app) {
  const AppTraffic& at = ctx.workload.apps[app];
  for (const Route& route : ctx.routes[app]) {
    AppPlacement out;
    bool ok = true;
    for (const Packet& pkt : at.packets) {
      auto placed = first_fit(ctx, occ, at, route, pkt);
      if (!placed) {
        ok = false;
        break;
      }
      occ.add(placed->fp);
      out.assignment.packets.push_back(placed->vars);
      out.footprints.push_back(std::move(placed->fp));
    }
    if (ok) {
      out.assignment.accepted = true;
      out.assignment.route = route;
      return out;
    }
    withdraw(occ, out.footprints);
    if (ctx.expired()) break;
  }
  return std::nullopt;
}

/// Applications by deadline, then larger messages first, then id.
std::vector<std::size_t> greedy_order(const Workload& w) {
  std::vector<std::size_t> order(w.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Application& x = w.apps[a].app;
    const Application& y = w.apps[b].app;
    return std::make_tuple(x.e2e, -x.msg_len, x.id) < std::make_tuple(y.e2e, -y.msg_len, y.id);
  });
  return order;
}

Schedule run_greedy(Context& ctx) {
  Schedule s = Schedule::empty_for(ctx.workload);
  Occupancy occ(ctx.graph);
  for (std::size_t app : greedy_order(ctx.workload)) {
    if (ctx.expired()) break;
    if (auto placed = place_first_fit(ctx, occ, app)) s.apps[app] = std::move(placed->assignment);
  }
  s.budget_exhausted = ctx.out_of_time;
  return s;
}

// ---------------------------------------------------------------------------
// Exhaustive

struct Option {
  PacketVars vars;
  Footprint fp;
};

// app -> route -> packet -> options with distinct resource use
using OptionTable = std::vector<std::vector<std::vector<std::vector<Option>>>>;

std::vector<Option> packet_options(Context& ctx, const AppTraffic& at, const Route& route, const Packet& pkt) {
  std::vector<Option> out;
  if (!detail::core_queues_suffice(ctx.graph, route, pkt.len)) return out;
  const Nanos t_ct = ctx.graph.time().t_ct();
  const Nanos msg = at.message(pkt.msg).arrival_offset;
  const Nanos tx0 = ctx.graph.tx_time(route.links[0], pkt.len);
  const int r_max = detail::max_cycle_shift(ctx.graph, route);
  const Nanos extra_end = route.has_dip_segment() ? t_ct : 1;
  Occupancy empty(ctx.graph);
  for (Nanos src = 0; src <= t_ct - tx0; src += ctx.grid)
    for (int r = 0; r <= r_max; ++r)
      for (Nanos extra = 0; extra < extra_end; extra += ctx.grid) {
        PacketVars v = make_vars(src, route, r, extra);
        Footprint fp = time_packet(ctx, route, msg, pkt.len, v);
        if (fp.delay > at.app.e2e || !empty.fits(fp)) continue;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Option& o) { return o.fp.same_resources(fp); });
        if (!seen) out.push_back({v, std::move(fp)});
      }
  return out;
}

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(Context& ctx, const OptionTable& table)
      : ctx_(ctx), table_(table), occ_(ctx.graph), current_(Schedule::empty_for(ctx.workload)), best_(current_) {}

  Schedule run() {
    dfs(0, 0);
    best_.budget_exhausted = ctx_.out_of_time;
    return best_;
  }

 private:
  int ceiling(std::size_t app, std::size_t accepted) const { return static_cast<int>(accepted + table_.size() - app); }

  // Returns true once admitting `app` cannot improve on the best.
  bool place(std::size_t app, std::size_t route, std::size_t accepted, std::size_t j) {
    const auto& packets = table_[app][route];
    if (j == packets.size()) {
      AppAssignment& as = current_.apps[app];
      as.accepted = true;
      as.route = ctx_.routes[app][route];
      dfs(app + 1, accepted + 1);
      as.accepted = false;
      as.route.reset();
      return best_count_ >= ceiling(app, accepted);
    }
    for (const Option& opt : packets[j]) {
      if (ctx_.expired()) return true;
      if (!occ_.fits(opt.fp)) continue;
      occ_.add(opt.fp);
      current_.apps[app].packets[j] = opt.vars;
      const bool done = place(app, route, accepted, j + 1);
      current_.apps[app].packets[j] = PacketVars{};
      occ_.remove(opt.fp);
      if (done) return true;
    }
    return false;
  }

  void dfs(std::size_t app, std::size_t accepted) {
    if (static_cast<int>(accepted) > best_count_) {
      best_count_ = static_cast<int>(accepted);
      best_ = current_;
    }
    if (app == table_.size() || ceiling(app, accepted) <= best_count_ || ctx_.expired()) return;
    for (std::size_t route = 0; route < table_[app].size(); ++route)
      if (place(app, route, accepted, 0)) break;
    if (ceiling(app + 1, accepted) > best_count_) dfs(app + 1, accepted);
  }

  Context& ctx_;
  const OptionTable& table_;
  Occupancy occ_;
  Schedule current_;
  Schedule best_;
  int best_count_ = 0;
};

// ---------------------------------------------------------------------------
// Genetic

struct PacketGene {
  Nanos src = 0;
  int r = 0;
  Nanos extra = 0;
};

struct AppGene {
  bool accept = false;
  std::size_t route = 0;
  std::vector<PacketGene> packets;
};

using Chromosome = std::vector<AppGene>;

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t generation, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

class Genetic {
 public:
  explicit Genetic(Context& ctx) : ctx_(ctx), order_(greedy_order(ctx.workload)) {}

  Schedule run() {
    const GeneticParams& p = ctx_.config.ga;
    std::vector<Chromosome> population;
    std::vector<Scored> scored;
    const auto admit = [&](Chromosome c) {
      Scored s = evaluate(std::move(c));
      population.push_back(s.genes);
      scored.push_back(std::move(s));
    };
    admit(encode(run_greedy(ctx_)));
    for (const Schedule& seed : ctx_.config.initial)
      if (seed.apps.size() == ctx_.workload.size()) admit(encode(seed));
    for (std::uint64_t i = 0; static_cast<int>(population.size()) < p.population && !ctx_.expired(); ++i) {
      std::mt19937_64 rng(stream_seed(p.seed, 0, i));
      admit(random_chromosome(rng));
    }
    const auto better = [](const Scored& a, const Scored& b) { return a.accepted > b.accepted; };
    for (int gen = 1; gen <= p.generations && !ctx_.expired(); ++gen) {
      if (best_of(scored).accepted == static_cast<int>(ctx_.workload.size())) break;
      std::vector<std::size_t> rank(scored.size());
      for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
      std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return better(scored[a], scored[b]); });
      std::vector<Scored> next;
      for (std::size_t e = 0; e < std::min<std::size_t>(2, rank.size()); ++e) next.push_back(scored[rank[e]]);
      for (std::uint64_t i = 0; static_cast<int>(next.size()) < p.population; ++i) {
        if (ctx_.expired()) break;
        std::mt19937_64 rng(stream_seed(p.seed, static_cast<std::uint64_t>(gen), i));
        const Chromosome& a = scored[tournament(scored, rng)].genes;
        const Chromosome& b = scored[tournament(scored, rng)].genes;
        Chromosome child = crossover(a, b, rng);
        mutate(child, rng);
        next.push_back(evaluate(std::move(child)));
      }
      scored = std::move(next);
    }
    Schedule best = best_of(scored).schedule;
    best.budget_exhausted = ctx_.out_of_time;
    return best;
  }

 private:
  struct Scored {
    Chromosome genes;
    Schedule schedule;
    int accepted = 0;
  };

  static const Scored& best_of(const std::vector<Scored>& all) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < all.size(); ++i)
      if (all[i].accepted > all[best].accepted) best = i;
    return all[best];
  }

  static std::size_t tournament(const std::vector<Scored>& all, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    std::size_t best = a;
    if (all[b].accepted > all[best].accepted) best = b;
    if (all[c].accepted > all[best].accepted) best = c;
    return best;
  }

  Nanos random_grid(std::mt19937_64& rng, Nanos limit) const {
    const Nanos slots = limit / ctx_.grid + 1;
    return ctx_.grid * static_cast<Nanos>(rng() % static_cast<std::uint64_t>(slots));
  }

  PacketGene random_packet(std::size_t app, std::size_t route, std::size_t slot, std::mt19937_64& rng) const {
    const AppTraffic& at = ctx_.workload.apps[app];
    PacketGene g;
    if (ctx_.routes[app].empty()) return g;
    const Route& rt = ctx_.routes[app][route];
    const Nanos tx0 = ctx_.graph.tx_time(rt.links[0], at.packets[slot].len);
    g.src = random_grid(rng, std::max<Nanos>(ctx_.graph.time().t_ct() - tx0, 0));
    g.r = static_cast<int>(rng() % static_cast<std::uint64_t>(detail::max_cycle_shift(ctx_.graph, rt) + 1));
    g.extra = rt.has_dip_segment() ? random_grid(rng, ctx_.graph.time().t_ct() - 1) : 0;
    return g;
  }

  Chromosome random_chromosome(std::mt19937_64& rng) const {
    Chromosome c(ctx_.workload.size());
    for (std::size_t a = 0; a < c.size(); ++a) {
      const std::size_t routes = ctx_.routes[a].size();
      c[a].accept = routes > 0 && (rng() & 1U);
      c[a].route = routes > 0 ? rng() % routes : 0;
      for (std::size_t s = 0; s < ctx_.workload.apps[a].packets.size(); ++s)
        c[a].packets.push_back(random_packet(a, c[a].route, s, rng));
    }
    return c;
  }

  Chromosome encode(const Schedule& s) const {
    Chromosome c(ctx_.workload.size());
    for (std::size_t a = 0; a < c.size(); ++a) {
      const AppAssignment& as = s.apps[a];
      c[a].packets.resize(ctx_.workload.apps[a].packets.size());
      if (!as.accepted || !as.route) continue;
      const auto& routes = ctx_.routes[a];
      const auto it = std::find(routes.begin(), routes.end(), *as.route);
      if (it == routes.end() || as.packets.size() != c[a].packets.size()) continue;
      c[a].accept = true;
      c[a].route = static_cast<std::size_t>(it - routes.begin());
      for (std::size_t k = 0; k < as.packets.size(); ++k) {
        c[a].packets[k].src = as.packets[k].src_offset.value_or(0);
        c[a].packets[k].r = as.packets[k].cycle_shift.value_or(0);
        c[a].packets[k].extra = as.packets[k].extra_delay.value_or(0);
      }
    }
    return c;
  }

  Chromosome crossover(const Chromosome& a, const Chromosome& b, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) >= ctx_.config.ga.crossover_rate) return a;
    Chromosome child = a;
    for (std::size_t i = 0; i < child.size(); ++i)
      if (rng() & 1U) child[i] = b[i];
    return child;
  }

  void mutate(Chromosome& c, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (u(rng) >= ctx_.config.ga.mutation_rate || ctx_.routes[a].empty()) continue;
      AppGene& g = c[a];
      switch (rng() % 3) {
        case 0: g.accept = !g.accept; break;
        case 1:
          g.route = rng() % ctx_.routes[a].size();
          for (std::size_t s = 0; s < g.packets.size(); ++s) g.packets[s] = random_packet(a, g.route, s, rng);
          break;
        default: {
          const std::size_t s = rng() % g.packets.size();
          g.packets[s] = random_packet(a, g.route, s, rng);
        }
      }
    }
  }

  struct Decoded {
    bool usable = false;
    std::vector<Footprint> fps;
  };

  /// Decodes, drops the most-violating application until the rest is
  /// consistent, then fills free room first-fit. The repaired genes are kept.
  Scored evaluate(Chromosome genes) {
    const std::size_t n = genes.size();
    std::vector<Decoded> dec(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (!genes[a].accept || ctx_.routes[a].empty()) continue;
      const AppTraffic& at = ctx_.workload.apps[a];
      const Route& route = ctx_.routes[a][genes[a].route];
      dec[a].usable = true;
      for (std::size_t s = 0; s < at.packets.size() && dec[a].usable; ++s) {
        const Packet& pkt = at.packets[s];
        const PacketGene& pg = genes[a].packets[s];
        const Nanos tx0 = ctx_.graph.tx_time(route.links[0], pkt.len);
        if (pg.src < 0 || pg.src > ctx_.graph.time().t_ct() - tx0 || pg.r < 0 ||
            pg.r > detail::max_cycle_shift(ctx_.graph, route) || !detail::core_queues_suffice(ctx_.graph, route, pkt.len)) {
          dec[a].usable = false;
          break;
        }
        Footprint fp = time_packet(ctx_, route, at.message(pkt.msg).arrival_offset, pkt.len,
                                   make_vars(pg.src, route, pg.r, pg.extra));
        Occupancy empty(ctx_.graph);
        if (fp.delay > at.app.e2e || !empty.fits(fp)) dec[a].usable = false;
        dec[a].fps.push_back(std::move(fp));
      }
    }
    std::vector<bool> in(n, false);
    for (std::size_t a = 0; a < n; ++a) in[a] = dec[a].usable;
    // repair
    while (true) {
      std::vector<int> clashes = count_clashes(dec, in);
      std::size_t worst = n;
      for (std::size_t i = order_.size(); i-- > 0;) {
        const std::size_t a = order_[i];
        if (in[a] && clashes[a] > 0 && (worst == n || clashes[a] > clashes[worst])) worst = a;
      }
      if (worst == n) break;
      in[worst] = false;
    }
    Occupancy occ(ctx_.graph);
    Schedule s = Schedule::empty_for(ctx_.workload);
    int accepted = 0;
    for (std::size_t a = 0; a < n; ++a) {
      genes[a].accept = in[a];
      if (!in[a]) continue;
      for (const auto& fp : dec[a].fps) occ.add(fp);
      s.apps[a].accepted = true;
      s.apps[a].route = ctx_.routes[a][genes[a].route];
      for (std::size_t k = 0; k < genes[a].packets.size(); ++k) {
        const PacketGene& pg = genes[a].packets[k];
        s.apps[a].packets[k] = make_vars(pg.src, *s.apps[a].route, pg.r, pg.extra);
      }
      ++accepted;
    }
    for (std::size_t a : order_) {
      if (in[a] || ctx_.expired()) continue;
      auto placed = place_first_fit(ctx_, occ, a);
      if (!placed) continue;
      const auto it = std::find(ctx_.routes[a].begin(), ctx_.routes[a].end(), *placed->assignment.route);
      genes[a].accept = true;
      genes[a].route = static_cast<std::size_t>(it - ctx_.routes[a].begin());
      for (std::size_t k = 0; k < genes[a].packets.size(); ++k) {
        const PacketVars& v = placed->assignment.packets[k];
        genes[a].packets[k] = {*v.src_offset, v.cycle_shift.value_or(0), v.extra_delay.value_or(0)};
      }
      s.apps[a] = std::move(placed->assignment);
      ++accepted;
    }
    return {std::move(genes), std::move(s), accepted};
  }

  /// Per application: overlapping windows and overloaded cycles it takes part in.
  std::vector<int> count_clashes(const std::vector<Decoded>& dec, const std::vector<bool>& in) const {
    std::vector<int> clashes(dec.size(), 0);
    std::map<LinkIndex, std::vector<std::pair<detail::Window, std::size_t>>> windows;
    std::map<std::pair<LinkIndex, CycleIndex>, std::vector<std::pair<detail::Load, std::size_t>>> loads;
    for (std::size_t a = 0; a < dec.size(); ++a) {
      if (!in[a]) continue;
      for (const auto& fp : dec[a].fps) {
        for (const auto& w : fp.windows) windows[w.link].push_back({w, a});
        for (const auto& ld : fp.loads) loads[{ld.link, ld.cycle}].push_back({ld, a});
      }
    }
    for (auto& [link, ws] : windows) {
      std::sort(ws.begin(), ws.end());
      for (std::size_t i = 0; i < ws.size(); ++i)
        for (std::size_t j = i + 1; j < ws.size() && ws[j].first.start < ws[i].first.end; ++j) {
          ++clashes[ws[i].second];
          ++clashes[ws[j].second];
        }
    }
    const Nanos t_dip = ctx_.graph.time().t_dip();
    for (auto& [where, ls] : loads) {
      std::int64_t bytes = 0;
      Nanos busy = 0;
      for (const auto& [ld, a] : ls) {
        bytes += ld.bytes;
        busy += ld.busy;
      }
      const bool over = busy > t_dip || static_cast<WideInt>(bytes) * 8'000'000'000 >
                                            static_cast<WideInt>(t_dip) * ctx_.graph.link(where.first).bw_bps;
      if (over)
        for (const auto& [ld, a] : ls) ++clashes[a];
    }
    return clashes;
  }

  Context& ctx_;
  std::vector<std::size_t> order_;
};

}  // namespace

// ---------------------------------------------------------------------------

Schedule solve_greedy(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config) {
  check_config(config, graph.time());
  Context ctx(graph, workload, config);
  return run_greedy(ctx);
}

Schedule solve_exhaustive(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config) {
  check_config(config, graph.time());
  Context ctx(graph, workload, config);
  const Nanos t_ct = graph.time().t_ct();
  // raw grid size first, so that hopeless instances are refused before any work
  double raw = 0.0;
  for (std::size_t a = 0; a < workload.size(); ++a) {
    double per_app = 1.0;
    for (const Route& route : ctx.routes[a]) {
      double per_route = 0.0;
      const double shifts = detail::max_cycle_shift(graph, route) + 1.0;
      const double extras = route.has_dip_segment() ? static_cast<double>(t_ct / ctx.grid) : 1.0;
      for (const Packet& pkt : workload.apps[a].packets) {
        const double srcs = static_cast<double>((t_ct - graph.tx_time(route.links[0], pkt.len)) / ctx.grid + 1);
        per_route += std::log10(std::max(srcs, 1.0) * shifts * extras);
      }
      per_app += std::pow(10.0, per_route);
    }
    raw += std::log10(per_app);
  }
  if (workload.size() > config.exhaustive_max_apps || raw > config.exhaustive_max_log10_space)
    throw SearchSpaceTooLarge(raw, workload.size());

  OptionTable table(workload.size());
  for (std::size_t a = 0; a < workload.size(); ++a) {
    for (std::size_t r = 0; r < ctx.routes[a].size(); ++r) {
      std::vector<std::vector<Option>> per_packet;
      for (const Packet& pkt : workload.apps[a].packets)
        per_packet.push_back(packet_options(ctx, workload.apps[a], ctx.routes[a][r], pkt));
      table[a].push_back(std::move(per_packet));
    }
  }
  return ExhaustiveSearch(ctx, table).run();
}

Schedule solve_genetic(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config) {
  check_config(config, graph.time());
  Context ctx(graph, workload, config);
  return Genetic(ctx).run();
}

Schedule solve_no_shaping(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config) {
  check_config(config, graph.time());
  Context ctx(graph, workload, config);
  const Nanos t_ct = graph.time().t_ct();
  Schedule s = Schedule::empty_for(workload);
  Occupancy occ(graph);
  for (std::size_t app : greedy_order(workload)) {
    const AppTraffic& at = workload.apps[app];
    for (const Route& route : ctx.routes[app]) {
      AppAssignment as;
      std::vector<Footprint> fps;
      bool ok = true;
      Nanos queued = 0;  // earlier packets of the same message ahead on the first link
      for (const Packet& pkt : at.packets) {
        if (pkt.pkt == 1) queued = 0;
        const Nanos tx0 = graph.tx_time(route.links[0], pkt.len);
        const Nanos src = mod_floor(at.message(pkt.msg).arrival_offset + queued, t_ct);
        queued += tx0;
        PacketVars v = make_vars(src, route, 0, 0);
        if (src > t_ct - tx0 || !detail::core_queues_suffice(graph, route, pkt.len)) {
          ok = false;
          break;
        }
        Footprint fp = time_packet(ctx, route, at.message(pkt.msg).arrival_offset, pkt.len, v);
        if (fp.delay > at.app.e2e || !occ.fits(fp)) {
          ok = false;
          break;
        }
        occ.add(fp);
        fps.push_back(std::move(fp));
        as.packets.push_back(v);
      }
      if (ok) {
        as.accepted = true;
        as.route = route;
        s.apps[app] = std::move(as);
        break;
      }
      withdraw(occ, fps);
    }
  }
  return s;
}

Schedule solve(const NetworkGraph& graph, const Workload& workload, const SolverConfig& config) {
  if (config.policy == Policy::NoShaping) return solve_no_shaping(graph, workload, config);
  switch (config.mode) {
    case SolverMode::Exhaustive: return solve_exhaustive(graph, workload, config);
    case SolverMode::Genetic: return solve_genetic(graph, workload, config);
    case SolverMode::Greedy: break;
  }
  return solve_greedy(graph, workload, config);
}

}  // namespace crossdet
