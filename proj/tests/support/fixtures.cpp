#include "support/fixtures.hpp"

#include <random>

namespace crossdet::testing {

NetworkGraph crossing_graph() {
  std::vector<Node> nodes{
      {"src", NodeKind::SourceHost, 0},     {"tas_in", NodeKind::TasEdgeSwitch, 0},
      {"dip_in", NodeKind::DipEdgeRouter, 0}, {"dip_out", NodeKind::DipEdgeRouter, 0},
      {"tas_out", NodeKind::TasEdgeSwitch, 0}, {"dst", NodeKind::DestHost, 0},
  };
  std::vector<Link> links{
      {"src", "tas_in", kGbps, 1'500, 8},       {"tas_in", "dip_in", kGbps, 1'500, 8},
      {"dip_in", "dip_out", 10 * kGbps, 25'000, 3}, {"dip_out", "tas_out", 10 * kGbps, 1'500, 3},
      {"tas_out", "dst", kGbps, 1'500, 8},
  };
  return build_graph(std::move(nodes), std::move(links), TimeConfig(50'000, 10'000));
}

Workload crossing_workload(const NetworkGraph& graph, Nanos e2e) {
  return make_workload(graph, {make_app("tau", "src", "dst", e2e, 3000, 50'000)}, std::vector<Nanos>{0});
}

Route crossing_route(const NetworkGraph& graph) {
  return make_route(graph, std::vector<std::string>{"src", "tas_in", "dip_in", "dip_out", "tas_out", "dst"});
}

NetworkGraph chain_graph(const ChainOptions& o) {
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::mt19937_64 rng(o.epoch_seed);
  auto epoch = [&]() -> Nanos { return o.epoch_seed == 0 ? 0 : static_cast<Nanos>(rng() % static_cast<std::uint64_t>(o.t_ct)); };
  for (int s = 0; s < o.sources; ++s) nodes.push_back({"h" + std::to_string(s), NodeKind::SourceHost, 0});
  nodes.push_back({"te_in", NodeKind::TasEdgeSwitch, 0});
  for (int c = 0; c <= o.core_hops; ++c) {
    const bool edge = c == 0 || c == o.core_hops;
    nodes.push_back({"r" + std::to_string(c), edge ? NodeKind::DipEdgeRouter : NodeKind::DipRouter, epoch()});
  }
  const Nanos out_epoch = epoch();
  nodes.push_back({"te_out", NodeKind::TasEdgeSwitch, out_epoch});
  nodes.push_back({"dst", NodeKind::DestHost, out_epoch});
  for (int s = 0; s < o.sources; ++s) links.push_back({"h" + std::to_string(s), "te_in", o.access_bw, o.access_delay, 8});
  links.push_back({"te_in", "r0", o.access_bw, o.access_delay, 8});
  for (int c = 0; c < o.core_hops; ++c)
    links.push_back({"r" + std::to_string(c), "r" + std::to_string(c + 1), o.core_bw, o.core_delay, o.dip_queues});
  links.push_back({"r" + std::to_string(o.core_hops), "te_out", o.core_bw, o.access_delay, o.dip_queues});
  links.push_back({"te_out", "dst", o.access_bw, o.access_delay, 8});
  return build_graph(std::move(nodes), std::move(links), TimeConfig(o.t_ct, o.t_dip));
}

Application make_app(std::string id, std::string src, std::string dest, Nanos e2e, std::int64_t len, Nanos period) {
  Application a;
  a.id = std::move(id);
  a.src = std::move(src);
  a.dest = std::move(dest);
  a.e2e = e2e;
  a.msg_len = len;
  a.period = period;
  return a;
}

}  // namespace crossdet::testing

namespace crossdet::testing {

Instance medium_instance(std::uint64_t seed, int n_apps) {
  std::mt19937_64 rng(seed);
  const auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  const TimeConfig time(200'000, 10'000);
  std::vector<Node> nodes;
  std::vector<Link> links;
  const auto both = [&](const std::string& a, const std::string& b, std::int64_t bw, Nanos d, int q) {
    links.push_back({a, b, bw, d, q});
    links.push_back({b, a, bw, d, q});
  };
  nodes.push_back({"hub", NodeKind::DipRouter, pick(0, 199'999)});
  for (int i = 0; i < 4; ++i) {
    const std::string n = std::to_string(i);
    const Nanos access_epoch = pick(0, 199'999);
    nodes.push_back({"E" + n, NodeKind::DipEdgeRouter, pick(0, 199'999)});
    nodes.push_back({"te" + n, NodeKind::TasEdgeSwitch, access_epoch});
    nodes.push_back({"src" + n, NodeKind::SourceHost, access_epoch});
    nodes.push_back({"dst" + n, NodeKind::DestHost, access_epoch});
    links.push_back({"src" + n, "te" + n, kGbps, 1'500, 8});
    links.push_back({"te" + n, "dst" + n, kGbps, 1'500, 8});
    both("te" + n, "E" + n, 10 * kGbps, 1'500, 4);
    both("E" + n, "hub", 10 * kGbps, pick(5'000, 60'000), 4);
  }
  for (int i = 0; i < 4; ++i)
    both("E" + std::to_string(i), "E" + std::to_string((i + 1) % 4), 10 * kGbps, pick(5'000, 60'000), 4);
  NetworkGraph graph = build_graph(std::move(nodes), std::move(links), time);
  std::vector<Application> apps;
  for (int i = 0; i < n_apps; ++i) {
    const auto s = std::to_string(pick(0, 3));
    const auto d = std::to_string(pick(0, 3));
    const Nanos period = pick(0, 2) == 0 ? 100'000 : 200'000;
    apps.push_back(make_app("app" + std::to_string(i), "src" + s, "dst" + d, pick(60'000, 400'000),
                            pick(100, 3'000), period));
  }
  Workload workload = make_workload(graph, std::move(apps), seed);
  return {std::move(graph), std::move(workload)};
}

}  // namespace crossdet::testing
