#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"
#include "crossdet/traffic.hpp"

namespace crossdet::testing {

inline constexpr std::int64_t kGbps = 1'000'000'000;

/// Five-cycle hypercycle (t_dip = 10 us) with the route
/// src -> tas_in -> dip_in -> dip_out -> tas_out -> dst. Access links are
/// 1 Gbps / 1.5 us, the core link 10 Gbps / 25 us. All epochs are zero.
NetworkGraph crossing_graph();

/// One application of two 1500-byte packets per 50 us on crossing_graph, first
/// message offset 0.
Workload crossing_workload(const NetworkGraph& graph, Nanos e2e = 1'000'000);

/// src -> tas_in -> dip_in -> dip_out -> tas_out -> dst, hand-picked values.
Route crossing_route(const NetworkGraph& graph);

/// Linear chain: `sources` hosts on one TAS edge switch, a DIP core of
/// `core_hops` links, a TAS edge switch and one destination host. The DIP
/// egress link runs at core_bw. A nonzero epoch_seed draws random epochs for
/// the DIP routers and the egress access network.
struct ChainOptions {
  int sources = 1;
  int core_hops = 1;
  Nanos t_ct = 2'000'000;
  Nanos t_dip = 10'000;
  std::int64_t access_bw = kGbps;
  Nanos access_delay = 1'500;
  std::int64_t core_bw = 10 * kGbps;
  Nanos core_delay = 150'000;
  int dip_queues = 4;
  std::uint64_t epoch_seed = 0;
};
NetworkGraph chain_graph(const ChainOptions& opts);

Application make_app(std::string id, std::string src, std::string dest, Nanos e2e, std::int64_t len, Nanos period);

}  // namespace crossdet::testing

namespace crossdet::testing {

struct Instance {
  NetworkGraph graph;
  Workload workload;
};

/// Five-router DIP core (four edge routers on a ring plus a hub) with one
/// access network per edge router, random epochs, t_ct = 200 us. Apps pick
/// random source and destination hosts.
Instance medium_instance(std::uint64_t seed, int apps);

}  // namespace crossdet::testing
