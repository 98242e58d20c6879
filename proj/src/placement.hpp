#pragma once

// Internal: what a timed packet occupies, and the running occupancy that
// the solvers place packets into.

#include <cstdint>
#include <map>
#include <vector>

#include "crossdet/cycle_map.hpp"
#include "crossdet/network.hpp"
#include "crossdet/schedule.hpp"

namespace crossdet::detail {

struct Window {
  LinkIndex link = 0;
  Nanos start = 0;  ///< local offset at the link's source, in [0, t_ct)
  Nanos end = 0;    ///< start + tx; beyond t_ct means the transmission straddles
  friend auto operator<=>(const Window&, const Window&) = default;
};

struct Load {
  LinkIndex link = 0;
  CycleIndex cycle = 0;  ///< reduced mod n_dip
  std::int64_t bytes = 0;
  Nanos busy = 0;
  friend auto operator<=>(const Load&, const Load&) = default;
};

struct Footprint {
  std::vector<Window> windows;  ///< in route order
  std::size_t ingress_windows = 0;  ///< windows before the DIP segment
  std::vector<Load> loads;
  Nanos delay = 0;

  bool same_resources(const Footprint& o) const { return windows == o.windows && loads == o.loads; }
};

Footprint footprint(const NetworkGraph& graph, const Route& route, const PacketTimeline& timeline,
                    std::int64_t len);

/// Every core hop leaves enough queues for the cycle advance of a packet of `len` bytes.
bool core_queues_suffice(const NetworkGraph& graph, const Route& route, std::int64_t len);
/// Largest admissible cycle shift, 0 for routes without a DIP segment.
int max_cycle_shift(const NetworkGraph& graph, const Route& route);

class Occupancy {
 public:
  explicit Occupancy(const NetworkGraph& graph);

  /// Windows [first, last) of fp are free and none straddles t_ct.
  bool windows_fit(const Footprint& fp, std::size_t first, std::size_t last) const;
  bool loads_fit(const Footprint& fp) const;
  bool fits(const Footprint& fp) const { return windows_fit(fp, 0, fp.windows.size()) && loads_fit(fp); }

  void add(const Footprint& fp);
  void remove(const Footprint& fp);

 private:
  const NetworkGraph* graph_;
  std::vector<std::map<Nanos, Nanos>> windows_;  // per link: start -> end
  std::vector<std::vector<std::pair<std::int64_t, Nanos>>> loads_;  // per link, per cycle: bytes, busy
};

}  // namespace crossdet::detail
