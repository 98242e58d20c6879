#include <doctest.h>

#include <string>
#include <vector>

#include "crossdet/scheduler.hpp"
#include "crossdet/validator.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace crossdet;
using testing::kGbps;
using testing::make_app;

namespace {

std::vector<std::string> ids(const NetworkGraph& g, const Route& r) {
  std::vector<std::string> out;
  for (NodeIndex v : r.nodes) out.push_back(g.node(v).id);
  return out;
}

NetworkGraph diamond(Nanos via_x, Nanos via_y) {
  std::vector<Node> nodes{{"s", NodeKind::SourceHost, 0},     {"ti", NodeKind::TasEdgeSwitch, 0},
                          {"E1", NodeKind::DipEdgeRouter, 0}, {"X", NodeKind::DipRouter, 0},
                          {"Y", NodeKind::DipRouter, 0},      {"E2", NodeKind::DipEdgeRouter, 0},
                          {"to", NodeKind::TasEdgeSwitch, 0}, {"d", NodeKind::DestHost, 0},
                          {"lonely", NodeKind::DestHost, 0}};
  std::vector<Link> links{{"s", "ti", kGbps, 1'500, 8},          {"ti", "E1", 10 * kGbps, 1'500, 8},
                          {"E1", "X", 10 * kGbps, via_x, 4},     {"E1", "Y", 10 * kGbps, via_y, 4},
                          {"X", "E2", 10 * kGbps, 10'000, 4},    {"Y", "E2", 10 * kGbps, 10'000, 4},
                          {"E2", "to", 10 * kGbps, 1'500, 4},    {"to", "d", kGbps, 1'500, 8}};
  return build_graph(std::move(nodes), std::move(links), TimeConfig(2'000'000, 10'000));
}

SolverConfig config_for(SolverMode mode) {
  SolverConfig c;
  c.mode = mode;
  c.ga.population = 16;
  c.ga.generations = 30;
  return c;
}

void require_feasible(const Schedule& s, const NetworkGraph& g, const Workload& w) {
  const auto report = validate(s, g, w);
  for (const auto& v : report.violations) MESSAGE(to_string(v.kind), ": ", v.detail);
  REQUIRE(report.feasible());
}

}  // namespace

TEST_SUITE("scheduler") {
  TEST_CASE("routes on a chain") {
    auto g = testing::chain_graph({});
    auto routes = enumerate_routes(g, g.node_index("h0"), g.node_index("dst"), 3);
    REQUIRE(routes.size() == 1);
    CHECK(ids(g, routes[0]) == std::vector<std::string>{"h0", "te_in", "r0", "r1", "te_out", "dst"});
  }

  TEST_CASE("unreachable destination has no route") {
    auto g = diamond(20'000, 30'000);
    CHECK(enumerate_routes(g, g.node_index("s"), g.node_index("lonely"), 3).empty());
  }

  TEST_CASE("equal-hop core paths ordered by delay, then by id") {
    auto g = diamond(30'000, 20'000);
    auto routes = enumerate_routes(g, g.node_index("s"), g.node_index("d"), 3);
    REQUIRE(routes.size() == 2);
    CHECK(g.node(routes[0].nodes[3]).id == "Y");
    CHECK(g.node(routes[1].nodes[3]).id == "X");
    auto tied = diamond(20'000, 20'000);
    auto tied_routes = enumerate_routes(tied, tied.node_index("s"), tied.node_index("d"), 3);
    REQUIRE(tied_routes.size() == 2);
    CHECK(tied.node(tied_routes[0].nodes[3]).id == "X");
    CHECK(enumerate_routes(g, g.node_index("s"), g.node_index("d"), 1).size() == 1);
  }

  TEST_CASE("route order matches the oracle's") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = testing::medium_instance(seed, 1);
      for (NodeIndex s : inst.graph.nodes_of_kind(NodeKind::SourceHost))
        for (NodeIndex d : inst.graph.nodes_of_kind(NodeKind::DestHost)) {
          auto ours = enumerate_routes(inst.graph, s, d, 4);
          auto theirs = testing::brute_force_routes(inst.graph, s, d, 4);
          REQUIRE(ours.size() == theirs.size());
          for (std::size_t i = 0; i < ours.size(); ++i) CHECK(ours[i].nodes == theirs[i]);
        }
    }
  }

  TEST_CASE("configuration checks") {
    const TimeConfig t(2'000'000, 10'000);
    SolverConfig c;
    CHECK_NOTHROW(check_config(c, t));
    c.offset_granularity = 3'000;
    CHECK_THROWS_AS(check_config(c, t), ModelError);
    c.offset_granularity = 2'500;
    CHECK_NOTHROW(check_config(c, t));
    c.k_routes = 0;
    CHECK_THROWS_AS(check_config(c, t), ModelError);
    CHECK(parse_solver_mode("genetic") == SolverMode::Genetic);
    CHECK(parse_policy("no-route") == Policy::NoRouteSelection);
    CHECK_THROWS_AS(parse_policy("sometimes"), ModelError);
  }

  TEST_CASE("one application with room to spare is accepted") {
    auto g = testing::chain_graph({});
    auto w = make_workload(g, {make_app("a", "h0", "dst", 1'000'000, 1500, 1'000'000)}, 3);
    for (auto mode : {SolverMode::Greedy, SolverMode::Exhaustive, SolverMode::Genetic}) {
      auto s = solve(g, w, config_for(mode));
      CHECK(s.accepted_count() == 1);
      require_feasible(s, g, w);
    }
  }

  TEST_CASE("two applications that overfill the first link: only one fits") {
    // 12 us packets on a 10 us grid: at most two of the four source slots are usable.
    auto g = testing::crossing_graph();
    auto w = make_workload(g,
                           {make_app("a", "src", "dst", 1'000'000, 3000, 50'000),
                            make_app("b", "src", "dst", 1'000'000, 3000, 50'000)},
                           std::vector<Nanos>{0, 0});
    auto s = solve_exhaustive(g, w, config_for(SolverMode::Exhaustive));
    CHECK(s.accepted_count() == 1);
    require_feasible(s, g, w);
    CHECK(testing::brute_force_max_accepted(g, w).best == 1);
  }

  TEST_CASE("exhaustive edge cases") {
    auto g = testing::crossing_graph();
    auto none = make_workload(g, {}, 1);
    CHECK(solve_exhaustive(g, none, config_for(SolverMode::Exhaustive)).accepted_count() == 0);

    auto tight = make_workload(g, {make_app("a", "src", "dst", 10'000, 1500, 50'000)}, 1);
    CHECK(solve_exhaustive(g, tight, config_for(SolverMode::Exhaustive)).accepted_count() == 0);

    auto big = testing::medium_instance(5, 12);
    SolverConfig c = config_for(SolverMode::Exhaustive);
    CHECK_THROWS_AS(solve_exhaustive(big.graph, big.workload, c), SearchSpaceTooLarge);
    c.exhaustive_max_apps = 100;
    c.exhaustive_max_log10_space = 5;
    try {
      solve_exhaustive(big.graph, big.workload, c);
      FAIL("expected a refusal");
    } catch (const SearchSpaceTooLarge& e) {
      CHECK(e.log10_size() > 5);
      CHECK(std::string(e.what()).find("10^") != std::string::npos);
    }
  }

  TEST_CASE("exhaustive equals brute force on tiny instances") {
    int matches = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto inst = testing::tiny_instance(seed);
      const int oracle = testing::brute_force_max_accepted(inst.graph, inst.workload).best;
      auto s = solve_exhaustive(inst.graph, inst.workload, config_for(SolverMode::Exhaustive));
      require_feasible(s, inst.graph, inst.workload);
      CHECK_MESSAGE(static_cast<int>(s.accepted_count()) == oracle, "seed ", seed);
      if (static_cast<int>(s.accepted_count()) == oracle) ++matches;
    }
    CHECK(matches == 20);
  }

  TEST_CASE("genetic is near-optimal on tiny instances") {
    int matches = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto inst = testing::tiny_instance(seed);
      const int oracle = testing::brute_force_max_accepted(inst.graph, inst.workload).best;
      SolverConfig c = config_for(SolverMode::Genetic);
      c.ga.seed = seed;
      auto s = solve_genetic(inst.graph, inst.workload, c);
      require_feasible(s, inst.graph, inst.workload);
      CHECK(static_cast<int>(s.accepted_count()) <= oracle);
      if (static_cast<int>(s.accepted_count()) == oracle) ++matches;
    }
    CHECK(matches >= 18);
  }

  TEST_CASE("greedy is bounded by exhaustive and exact for one application") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto inst = testing::tiny_instance(seed);
      auto greedy = solve_greedy(inst.graph, inst.workload, config_for(SolverMode::Greedy));
      auto exact = solve_exhaustive(inst.graph, inst.workload, config_for(SolverMode::Exhaustive));
      CHECK(greedy.accepted_count() <= exact.accepted_count());
    }
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = testing::medium_instance(seed, 1);
      auto greedy = solve_greedy(inst.graph, inst.workload, config_for(SolverMode::Greedy));
      auto exact = solve_exhaustive(inst.graph, inst.workload, config_for(SolverMode::Exhaustive));
      CHECK(greedy.accepted_count() == exact.accepted_count());
    }
  }

  TEST_CASE("every mode emits valid schedules") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      auto inst = testing::medium_instance(seed, 20);
      SolverConfig c = config_for(SolverMode::Greedy);
      c.ga.seed = seed;
      auto greedy = solve_greedy(inst.graph, inst.workload, c);
      require_feasible(greedy, inst.graph, inst.workload);
      auto genetic = solve_genetic(inst.graph, inst.workload, c);
      require_feasible(genetic, inst.graph, inst.workload);
      CHECK(genetic.accepted_count() >= greedy.accepted_count());
      for (auto policy : {Policy::NoShaping, Policy::NoRouteSelection}) {
        c.policy = policy;
        require_feasible(solve(inst.graph, inst.workload, c), inst.graph, inst.workload);
      }
    }
  }

  TEST_CASE("genetic keeps a feasible starting schedule") {
    auto inst = testing::medium_instance(3, 20);
    SolverConfig c = config_for(SolverMode::Genetic);
    const Schedule start = solve_greedy(inst.graph, inst.workload, c);
    c.initial.assign(4, start);
    c.ga.generations = 3;
    CHECK(solve_genetic(inst.graph, inst.workload, c).accepted_count() >= start.accepted_count());
  }

  TEST_CASE("same seed, same schedule") {
    auto inst = testing::medium_instance(9, 15);
    SolverConfig c = config_for(SolverMode::Genetic);
    c.ga.seed = 77;
    CHECK(solve_genetic(inst.graph, inst.workload, c) == solve_genetic(inst.graph, inst.workload, c));
    CHECK(solve_greedy(inst.graph, inst.workload, c) == solve_greedy(inst.graph, inst.workload, c));
  }

  TEST_CASE("more core bandwidth never lowers the optimum") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = testing::tiny_instance(seed);
      std::vector<Node> nodes(inst.graph.nodes().begin(), inst.graph.nodes().end());
      std::vector<Link> links(inst.graph.links().begin(), inst.graph.links().end());
      for (auto& l : links)
        if (is_dip(inst.graph.node(inst.graph.node_index(l.src)).kind)) l.bw_bps *= 4;
      auto faster = build_graph(nodes, links, inst.graph.time());
      std::vector<Application> apps;
      for (const auto& at : inst.workload.apps) apps.push_back(at.app);
      std::vector<Nanos> first;
      for (const auto& at : inst.workload.apps) first.push_back(at.messages[0].arrival_offset);
      auto w2 = make_workload(faster, apps, first);
      auto slow = solve_exhaustive(inst.graph, inst.workload, config_for(SolverMode::Exhaustive));
      auto fast = solve_exhaustive(faster, w2, config_for(SolverMode::Exhaustive));
      CHECK(fast.accepted_count() >= slow.accepted_count());
    }
  }

  TEST_CASE("immediate forwarding baseline") {
    auto g = testing::chain_graph({});
    auto w = make_workload(g, {make_app("a", "h0", "dst", 10'000'000, 1500, 1'000'000)}, std::vector<Nanos>{4'000});
    SolverConfig c;
    c.policy = Policy::NoShaping;
    auto s = solve(g, w, c);
    REQUIRE(s.accepted_count() == 1);
    CHECK(s.apps[0].packets[0].src_offset == 4'000);
    CHECK(s.apps[0].packets[1].src_offset == 1'004'000);
    for (const auto& v : s.apps[0].packets) {
      CHECK(v.cycle_shift == 0);
      CHECK(v.extra_delay == 0);
    }
    require_feasible(s, g, w);

    // Back-to-back packets leave the core one 10 us cycle apart, closer than
    // their 12 us transmission at the egress, so immediate forwarding fails.
    auto pair = make_workload(g, {make_app("b", "h0", "dst", 10'000'000, 3000, 2'000'000)}, std::vector<Nanos>{4'000});
    CHECK(solve(g, pair, c).accepted_count() == 0);
    c.policy = Policy::Full;
    CHECK(solve(g, pair, c).accepted_count() == 1);
  }
}
