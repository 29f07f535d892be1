#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace airsched {

// One round's scheduling decision. direct_set transmits straight to the PS at
// common amplitude lambda1; relay_set transmits to the relay at lambda2 and
// the relay forwards with gain `amplify`. slack holds the per-device
// constraint residual: zero exactly for scheduled devices.
struct Schedule {
  std::vector<int> direct_set;           // ascending device ids
  std::vector<int> relay_set;            // ascending device ids
  double lambda1 = 0.0;
  std::optional<double> lambda2;         // present iff relay_set nonempty
  std::optional<double> amplify;         // lambda1 / (lambda2 * f_n)
  std::vector<std::uint8_t> mode_flags;  // 1 iff the device is in relay_set
  std::vector<double> slack;

  int scheduled_count() const {
    return static_cast<int>(direct_set.size() + relay_set.size());
  }

  // Sorted union of both sets.
  std::vector<int> scheduled_ids() const;
};

// Aggregation distortion of the chosen amplitudes: noise_var/lambda1^2 plus
// noise_var/lambda2^2 when a relay leg is present.
double aggregation_mse(const Schedule& schedule, double noise_var);

}  // namespace airsched
