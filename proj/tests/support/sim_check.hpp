#pragma once

#include <cstddef>
#include <string>

#include "crossdet/schedule.hpp"
#include "crossdet/simulator.hpp"

namespace crossdet::testing {

struct ExactnessReport {
  std::size_t packets = 0;     ///< scheduled packet instances compared
  std::size_t mismatches = 0;
  std::string first;           ///< description of the first mismatch
};

/// Compares every scheduled packet in `trace` with the analytic model: the
/// delivery against packet_e2e_delay, TAS-side hops against the predicted
/// timeline exactly, DIP hops against their predicted cycle window.
ExactnessReport compare_with_model(const SimTrace& trace, const Schedule& schedule, const NetworkGraph& graph,
                                   const Workload& workload);

/// Hop rows of the applications accepted in `schedule`.
std::vector<HopRecord> scheduled_rows(const SimTrace& trace, const Schedule& schedule);

}  // namespace crossdet::testing
