#include "airsched/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace airsched {

namespace {
// j^2 / r^alpha (or h^2 / d^alpha): transmit energy per unit squared amplitude
// is the reciprocal. Shared form so the priority/energy identity holds to ulps.
double channel_gain(double mag2, double dist, double alpha) {
  return mag2 / std::pow(dist, alpha);
}
}  // namespace

double round_allowance(const Device& device, const EnergyLedger& ledger, int round,
                       const SystemParams& params, AllowancePolicy policy) {
  if (round < 0 || round >= params.total_rounds)
    throw std::invalid_argument("round_allowance: round out of range");
  if (policy == AllowancePolicy::kFixedPerRound)
    return device.total_budget / params.total_rounds;
  const double residual = device.total_budget - ledger.spent.at(device.id);
  if (residual <= 0.0) return 0.0;  // exhausted budget
  return residual / static_cast<double>(params.total_rounds - round);
}

double tx_energy_direct(double lambda1, const Device& device,
                        const SystemParams& params) {
  if (!(lambda1 > 0.0)) throw std::domain_error("tx_energy_direct: lambda1 must be > 0");
  if (device.h_mag2 <= 0.0) return std::numeric_limits<double>::infinity();
  return lambda1 * lambda1 /
         channel_gain(device.h_mag2, device.dist_ps, params.path_loss_exp);
}

double tx_energy_relay(double lambda2, const Device& device,
                       const SystemParams& params) {
  if (!(lambda2 > 0.0)) throw std::domain_error("tx_energy_relay: lambda2 must be > 0");
  if (device.j_mag2 <= 0.0) return std::numeric_limits<double>::infinity();
  return lambda2 * lambda2 /
         channel_gain(device.j_mag2, device.dist_relay, params.path_loss_exp);
}

double relay_energy(double lambda1, double lambda2, int relay_set_size,
                    const SystemParams& params) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw std::domain_error("relay_energy: amplitudes must be > 0");
  if (relay_set_size < 0) throw std::invalid_argument("relay_energy: negative set size");
  const double l1sq = lambda1 * lambda1;
  const double l2sq = lambda2 * lambda2;
  return (relay_set_size * l1sq + l1sq / l2sq * params.noise_var) / params.fn_mag2;
}

EnergyLedger charge_round(const Schedule& schedule, const std::vector<Device>& devices,
                          const EnergyLedger& ledger, const SystemParams& params) {
  EnergyLedger next = ledger;
  const double compute_cost = params.compute_per_sample * params.batch_size;

  std::vector<const Device*> by_id(next.spent.size(), nullptr);
  for (const Device& dev : devices) {
    if (dev.id < 0 || static_cast<std::size_t>(dev.id) >= by_id.size())
      throw std::invalid_argument("charge_round: device id outside ledger");
    by_id[static_cast<std::size_t>(dev.id)] = &dev;
  }

  auto charge = [&](int id, bool via_relay) {
    const Device* dev = by_id.at(static_cast<std::size_t>(id));
    if (dev == nullptr) throw std::invalid_argument("charge_round: unknown device id");
    const double tx = via_relay ? tx_energy_relay(schedule.lambda2.value(), *dev, params)
                                : tx_energy_direct(schedule.lambda1, *dev, params);
    double& spent = next.spent[static_cast<std::size_t>(id)];
    spent += compute_cost + tx;
    if (spent > dev->total_budget * (1.0 + 1e-9) + 1e-15)
      throw std::logic_error("charge_round: device charged past its total budget");
    if (spent > dev->total_budget) spent = dev->total_budget;  // rounding spill at the bound
  };

  for (int id : schedule.direct_set) charge(id, false);
  for (int id : schedule.relay_set) charge(id, true);

  next.relay_spent_last_round =
      schedule.relay_set.empty()
          ? 0.0
          : relay_energy(schedule.lambda1, schedule.lambda2.value(),
                         static_cast<int>(schedule.relay_set.size()), params);
  return next;
}

}  // namespace airsched
