#include "crossdet/time.hpp"

#include <limits>

namespace crossdet {

Nanos transmission_time(std::int64_t bytes, std::int64_t bw_bps) {
  if (bw_bps <= 0) throw ModelError("bandwidth must be positive");
  if (bytes < 0) throw ModelError("negative packet length");
  const WideInt bits_ns = static_cast<WideInt>(bytes) * 8 * 1'000'000'000;
  const WideInt t = (bits_ns + bw_bps - 1) / bw_bps;
  if (t > std::numeric_limits<Nanos>::max()) throw ModelError("transmission time overflows");
  return static_cast<Nanos>(t);
}

TimeConfig::TimeConfig(Nanos t_ct, Nanos t_dip)
    : TimeConfig(t_ct, t_dip, t_dip > 0 ? t_ct / t_dip : 0, t_ct) {}

TimeConfig::TimeConfig(Nanos t_ct, Nanos t_dip, std::int64_t n_dip, Nanos t_hc)
    : t_ct_(t_ct), t_dip_(t_dip), n_dip_(n_dip), t_hc_(t_hc) {
  if (t_ct <= 0 || t_dip <= 0 || t_hc <= 0) throw ModelError("time config: durations must be positive");
  if (n_dip <= 0) throw ModelError("time config: n_dip must be a positive integer");
  if (t_hc != t_ct) throw ModelError("time config: hypercycle must equal the cycle time");
  if (n_dip * t_dip != t_hc)
    throw ModelError("time config: hypercycle " + std::to_string(t_hc) + " ns is not " + std::to_string(n_dip) +
                     " x " + std::to_string(t_dip) + " ns");
}

}  // namespace crossdet
