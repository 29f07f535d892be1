#pragma once

#include <vector>

#include "airsched/scheduler.hpp"

namespace airsched {

struct OracleResult {
  int best_count = 0;
  Schedule best_schedule;
  long candidates_examined = 0;
};

// Exact reference solver: enumerates every relay subset on small instances
// (K <= 12) and returns the feasible candidate scheduling the most devices.
// Equal counts resolve to fewer relay devices, then to the larger lambda2, the
// same order the prefix scan produces.
OracleResult solve_exact(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params,
                         AllowancePolicy policy = AllowancePolicy::kDynamic);

// Re-checks every schedule constraint from scratch: set disjointness, the
// per-device power bounds at the round's allowance, the distortion cap, the
// relay power cap, and the flag/slack bookkeeping.
bool verify_schedule(const Schedule& schedule, const std::vector<Device>& devices,
                     const EnergyLedger& ledger, int round, const SystemParams& params,
                     AllowancePolicy policy = AllowancePolicy::kDynamic);

// Same checks against explicitly supplied allowances (indexed by device id).
bool verify_schedule(const Schedule& schedule, const std::vector<Device>& devices,
                     const std::vector<double>& allowances, const SystemParams& params);

}  // namespace airsched
