#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crossdet {

/// All time in the system is integer nanoseconds.
using Nanos = std::int64_t;

/// Wide intermediate for bits x nanoseconds products.
__extension__ typedef __int128 WideInt;

/// Invalid user input: scenario files, configurations, schedules.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant was breached (a compiler, scheduler or simulator bug).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

/// Result always in [0, b) for b > 0.
constexpr std::int64_t mod_floor(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

/// ceil(8 * bytes * 1e9 / bw_bps) nanoseconds.
Nanos transmission_time(std::int64_t bytes, std::int64_t bw_bps);

/// Cycle time, DIP cycle and hypercycle lengths. The hypercycle equals the
/// TAS cycle time and holds an integral number of DIP cycles.
class TimeConfig {
 public:
  /// Derives n_dip = t_ct / t_dip; throws ModelError when not integral.
  TimeConfig(Nanos t_ct, Nanos t_dip);
  TimeConfig(Nanos t_ct, Nanos t_dip, std::int64_t n_dip, Nanos t_hc);

  Nanos t_ct() const { return t_ct_; }
  Nanos t_dip() const { return t_dip_; }
  Nanos t_hc() const { return t_hc_; }
  std::int64_t n_dip() const { return n_dip_; }

  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;

 private:
  Nanos t_ct_;
  Nanos t_dip_;
  std::int64_t n_dip_;
  Nanos t_hc_;
};

}  // namespace crossdet
