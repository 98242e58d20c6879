#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "crossdet/device_config.hpp"
#include "crossdet/scheduler.hpp"
#include "crossdet/validator.hpp"
#include "support/fixtures.hpp"

using namespace crossdet;
using testing::kGbps;
using testing::make_app;

namespace {

PacketVars vars(Nanos src, int r, Nanos extra) {
  PacketVars v;
  v.src_offset = src;
  v.cycle_shift = r;
  v.extra_delay = extra;
  return v;
}

struct Crossing {
  NetworkGraph graph = testing::crossing_graph();
  Workload workload = testing::crossing_workload(graph);
  Schedule schedule = Schedule::empty_for(workload);
  Crossing() {
    schedule.apps[0].accepted = true;
    schedule.apps[0].route = testing::crossing_route(graph);
    schedule.apps[0].packets = {vars(20'000, 1, 0), vars(8'000, 1, 22'000)};
  }
};

}  // namespace

TEST_SUITE("device_config") {
  TEST_CASE("gate strings put Q1 on the left") {
    CHECK(gate_string(8) == "ccccccco");
    CHECK(gate_string(5) == "ccccoccc");
    CHECK(gate_string(1) == "occccccc");
  }

  TEST_CASE("four packets at one source use Q8 down to Q5") {
    auto g = testing::chain_graph({});
    auto w = make_workload(g,
                           {make_app("a", "h0", "dst", 10'000'000, 3000, 2'000'000),
                            make_app("b", "h0", "dst", 10'000'000, 3000, 2'000'000)},
                           std::vector<Nanos>{0, 100'000});
    auto s = solve_greedy(g, w, SolverConfig{});
    REQUIRE(s.accepted_count() == 2);
    auto lists = compile_gcl(s, g, w, g.node_index("h0"));
    REQUIRE(lists.size() == 1);
    const auto& e = lists[0].entries;
    REQUIRE(e.size() == 4);
    CHECK(e[0].gate_states == "ccccccco");
    CHECK(e[1].gate_states == "ccccccoc");
    CHECK(e[2].gate_states == "cccccocc");
    CHECK(e[3].gate_states == "ccccoccc");
    std::vector<Nanos> offsets;
    for (const auto& as : s.apps)
      for (const auto& v : as.packets) offsets.push_back(*v.src_offset);
    std::sort(offsets.begin(), offsets.end());
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(e[i].offset == offsets[i]);
      CHECK(e[i].duration == 12'000);
    }
    CHECK(lists[0].cycle == 2'000'000);
  }

  TEST_CASE("idle port has an empty list; a lone packet gets one entry") {
    Crossing f;
    auto empty = Schedule::empty_for(f.workload);
    auto lists = compile_gcl(empty, f.graph, f.workload, f.graph.node_index("src"));
    REQUIRE(lists.size() == 1);
    CHECK(lists[0].entries.empty());

    auto g = testing::chain_graph({});
    auto w = make_workload(g, {make_app("a", "h0", "dst", 10'000'000, 1500, 2'000'000)}, std::vector<Nanos>{0});
    auto s = Schedule::empty_for(w);
    s.apps[0].accepted = true;
    s.apps[0].route = make_route(g, std::vector<std::string>{"h0", "te_in", "r0", "r1", "te_out", "dst"});
    s.apps[0].packets = {vars(0, 0, 0)};
    auto one = compile_gcl(s, g, w, g.node_index("h0"));
    REQUIRE(one[0].entries.size() == 1);
    CHECK(one[0].entries[0].offset == 0);
    CHECK(one[0].entries[0].gate_states == "ccccccco");
  }

  TEST_CASE("core table without delay is the next-cycle rule") {
    testing::ChainOptions o;
    o.core_delay = 0;
    auto g = testing::chain_graph(o);
    auto w = make_workload(g, {}, 1);
    auto table = compile_dip_table(Schedule::empty_for(w), g, w, g.node_index("r1"));
    REQUIRE(table.core.size() == 1);
    const auto n = g.time().n_dip();
    for (CycleIndex c = 0; c < n; ++c) CHECK(table.core[0].next[static_cast<std::size_t>(c)] == (c + 1) % n);
  }

  TEST_CASE("edge ingress steers the packet to the queue of cycle 4") {
    std::vector<Node> nodes{{"h", NodeKind::SourceHost, 5'000},    {"ti", NodeKind::TasEdgeSwitch, 5'000},
                            {"E1", NodeKind::DipEdgeRouter, 0},    {"E2", NodeKind::DipEdgeRouter, 0},
                            {"to", NodeKind::TasEdgeSwitch, 0},    {"d", NodeKind::DestHost, 0}};
    std::vector<Link> links{{"h", "ti", 10 * kGbps, 0, 8},         {"ti", "E1", kGbps, 1'500, 8},
                            {"E1", "E2", 10 * kGbps, 25'000, 3},   {"E2", "to", 10 * kGbps, 1'500, 3},
                            {"to", "d", kGbps, 1'500, 8}};
    auto g = build_graph(nodes, links, TimeConfig(50'000, 10'000));
    auto w = make_workload(g, {make_app("a", "h", "d", 1'000'000, 1500, 50'000)}, std::vector<Nanos>{0});
    auto s = Schedule::empty_for(w);
    s.apps[0].accepted = true;
    s.apps[0].route = make_route(g, std::vector<std::string>{"h", "ti", "E1", "E2", "to", "d"});
    s.apps[0].packets = {vars(1'800, 1, 10'000)};  // leaves ti at local 3 us
    REQUIRE(validate(s, g, w).feasible());
    auto table = compile_dip_table(s, g, w, g.node_index("E1"));
    REQUIRE(table.ingress.size() == 1);
    const auto& e = table.ingress[0];
    CHECK(e.arrival_cycle == 2);
    CHECK(e.shift == 1);
    CHECK(e.out_cycle == 4);
    CHECK(e.queue_advance == 2);
    CHECK(g.link(e.out_link).dst == "E2");
  }

  TEST_CASE("hand-traced route: cycle 1 maps to cycle 0 at the second router") {
    Crossing f;
    auto table = compile_dip_table(f.schedule, f.graph, f.workload, f.graph.node_index("dip_out"));
    REQUIRE(table.core.size() == 1);
    CHECK(table.core[0].next[1] == 0);
    CHECK(table.ingress.empty());
    auto ingress = compile_dip_table(f.schedule, f.graph, f.workload, f.graph.node_index("dip_in"));
    REQUIRE(ingress.ingress.size() == 2);
    CHECK(ingress.ingress[0].out_cycle == 1);
  }

  TEST_CASE("PIFO ranks follow departures, not arrivals") {
    Crossing f;
    auto prog = compile_pifo(f.schedule, f.graph, f.workload, f.graph.node_index("tas_out"));
    REQUIRE(prog.entries.size() == 2);
    // packet 2 reaches tas_out first (101.5 us) but leaves after packet 1
    CHECK(prog.entries[0].packet.pkt == 1);
    CHECK(prog.entries[0].arrival_bound == 11'500);  // cycle 0
    CHECK(prog.entries[0].rank == 11'500);
    CHECK(prog.entries[1].packet.pkt == 2);
    CHECK(prog.entries[1].arrival_bound == 1'500);  // cycle 4
    CHECK(prog.entries[1].extra_delay == 22'000);
    CHECK(prog.entries[1].rank == 23'500);
    CHECK(compile_pifo(f.schedule, f.graph, f.workload, f.graph.node_index("tas_in")).entries.empty());
  }

  TEST_CASE("infeasible schedules are refused") {
    Crossing f;
    f.schedule.apps[0].packets[0].cycle_shift = 5;
    CHECK_THROWS_AS(compile_all(f.schedule, f.graph, f.workload), ModelError);
    Crossing clash;
    clash.schedule.apps[0].packets[1] = clash.schedule.apps[0].packets[0];
    CHECK_THROWS_AS(compile_all(clash.schedule, clash.graph, clash.workload), ModelError);
  }

  TEST_CASE("compilation succeeds on solver output") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = testing::medium_instance(seed, 20);
      auto s = solve_greedy(inst.graph, inst.workload, SolverConfig{});
      DevicePrograms p;
      REQUIRE_NOTHROW(p = compile_all(s, inst.graph, inst.workload));
      for (const auto& gcl : p.gcls) {
        for (std::size_t i = 0; i < gcl.entries.size(); ++i) {
          const auto& e = gcl.entries[i];
          CHECK(e.offset >= 0);
          CHECK(e.offset < gcl.cycle);
          CHECK(std::count(e.gate_states.begin(), e.gate_states.end(), 'o') == 1);
          if (i > 0) CHECK(gcl.entries[i - 1].offset < e.offset);
        }
      }
      for (const auto& t : p.dip_tables)
        for (const auto& e : t.ingress) {
          CHECK(e.out_cycle >= 0);
          CHECK(e.out_cycle < inst.graph.time().n_dip());
          CHECK(e.queue_advance <= inst.graph.link(e.out_link).queues - 1);
        }
    }
  }
}
