#pragma once

#include <vector>

#include "airsched/schedule.hpp"
#include "airsched/topology.hpp"

namespace airsched {

// Dynamic: remaining budget spread over remaining rounds, (P_k - spent)/(T - t).
// FixedPerRound: P_k / T regardless of history.
enum class AllowancePolicy { kDynamic, kFixedPerRound };

struct EnergyLedger {
  std::vector<double> spent;  // cumulative joules, indexed by device id
  double relay_spent_last_round = 0.0;

  EnergyLedger() = default;
  explicit EnergyLedger(std::size_t num_devices) : spent(num_devices, 0.0) {}
};

// Per-round budget of one device at round t (0-based, t < T). Returns 0 once
// the budget is exhausted.
double round_allowance(const Device& device, const EnergyLedger& ledger, int round,
                       const SystemParams& params,
                       AllowancePolicy policy = AllowancePolicy::kDynamic);

// lambda1^2 * d^alpha / |h|^2. Infinite when the direct channel is dead.
double tx_energy_direct(double lambda1, const Device& device,
                        const SystemParams& params);

// lambda2^2 * r^alpha / |j|^2. Infinite when the relay channel is dead.
double tx_energy_relay(double lambda2, const Device& device,
                       const SystemParams& params);

// Relay transmit power: (|S_i| * lambda1^2 + lambda1^2/lambda2^2 * sigma^2) / |f_n|^2.
double relay_energy(double lambda1, double lambda2, int relay_set_size,
                    const SystemParams& params);

// Books one round: scheduled devices pay compute plus their transmit energy,
// everyone else pays nothing. Throws if any device would exceed its total
// budget (a scheduler bug, not a data condition).
EnergyLedger charge_round(const Schedule& schedule, const std::vector<Device>& devices,
                          const EnergyLedger& ledger, const SystemParams& params);

}  // namespace airsched
