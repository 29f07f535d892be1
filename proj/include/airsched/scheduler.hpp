#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "airsched/energy.hpp"
#include "airsched/schedule.hpp"

namespace airsched {

// Per-device relay priority: (allowance - compute cost) * |j|^2 / r^alpha,
// the largest squared amplitude the device can afford on the relay leg.
struct PriorityTable {
  std::vector<double> psi;  // indexed by device id; <= 0 marks an ineligible device
  std::vector<int> order;   // eligible ids, psi descending, id ascending on ties
};

PriorityTable priorities(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params,
                         AllowancePolicy policy = AllowancePolicy::kDynamic);

// Smallest lambda1 meeting the distortion cap for a given lambda2:
// sqrt(sigma^2 * lambda2^2 / (cap * lambda2^2 - sigma^2)). Requires
// lambda2 > sqrt(sigma^2 / cap); throws otherwise.
double lambda1_star(double lambda2, const SystemParams& params);

// Whether the relay can serve `relay_set_size` devices at amplitude lambda2
// within its power cap: relay_budget * fn_mag2 >= sigma^2 * (n * lambda2^2 +
// sigma^2) / (cap * lambda2^2 - sigma^2). Inclusive at the boundary. Once
// false along a descending-lambda2 prefix scan it stays false.
bool relay_feasible(double lambda2, int relay_set_size, const SystemParams& params);

// Direct-eligible devices at the given lambda1, skipping flagged ids.
int count_direct_eligible(const std::vector<Device>& devices,
                          const std::vector<double>& allowances, double lambda1,
                          const std::vector<std::uint8_t>& excluded,
                          const SystemParams& params);

// Everyone transmits directly at the cap-floor amplitude sqrt(sigma^2/cap);
// the schedule admits every device whose budget covers that.
Schedule schedule_no_relay(const std::vector<Device>& devices, const EnergyLedger& ledger,
                           int round, const SystemParams& params,
                           AllowancePolicy policy = AllowancePolicy::kDynamic);

// Priority prefix scan with closed-form amplitudes: for each feasible prefix
// of the priority order, lambda2 = sqrt(psi of the last member), lambda1 from
// lambda1_star, plus the empty-prefix direct-only candidate; returns the
// candidate scheduling the most devices (fewer relay devices on ties).
Schedule schedule_greedy(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params,
                         AllowancePolicy policy = AllowancePolicy::kDynamic);

// Benchmark: every participant goes through the relay, fixed per-round
// allowance P_k/T, no direct fallback.
Schedule schedule_all_relay(const std::vector<Device>& devices,
                            const EnergyLedger& ledger, int round,
                            const SystemParams& params);

using SchemeFn = std::function<Schedule(const std::vector<Device>&, const EnergyLedger&,
                                        int, const SystemParams&)>;

// proposed | no-relay | all-relay | ideal-relay. ideal-relay is all-relay
// with fn_mag2 pinned to 1.
const std::map<std::string, SchemeFn>& scheme_registry();
std::vector<std::string> scheme_names();
AllowancePolicy scheme_policy(const std::string& name);

namespace detail {
// Greedy without the empty-prefix candidate; exists for mutation tests.
Schedule schedule_greedy_skip_direct_candidate(const std::vector<Device>& devices,
                                               const EnergyLedger& ledger, int round,
                                               const SystemParams& params);
}  // namespace detail

}  // namespace airsched
