#include "airsched/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace airsched {

std::vector<int> Schedule::scheduled_ids() const {
  std::vector<int> ids;
  ids.reserve(direct_set.size() + relay_set.size());
  ids.insert(ids.end(), direct_set.begin(), direct_set.end());
  ids.insert(ids.end(), relay_set.begin(), relay_set.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

double aggregation_mse(const Schedule& schedule, double noise_var) {
  double mse = noise_var / (schedule.lambda1 * schedule.lambda1);
  if (schedule.lambda2)
    mse += noise_var / (*schedule.lambda2 * *schedule.lambda2);
  return mse;
}

namespace {

double compute_cost_of(const SystemParams& params) {
  return params.compute_per_sample * params.batch_size;
}

std::vector<double> round_allowances(const std::vector<Device>& devices,
                                     const EnergyLedger& ledger, int round,
                                     const SystemParams& params,
                                     AllowancePolicy policy) {
  std::vector<double> alw(devices.size(), 0.0);
  for (const Device& dev : devices)
    alw.at(static_cast<std::size_t>(dev.id)) =
        round_allowance(dev, ledger, round, params, policy);
  return alw;
}

// d^alpha / h^2 per device id; infinite when the direct channel is dead.
std::vector<double> direct_cost_coeffs(const std::vector<Device>& devices,
                                       const SystemParams& params) {
  std::vector<double> coeff(devices.size(), 0.0);
  for (const Device& dev : devices)
    coeff.at(static_cast<std::size_t>(dev.id)) =
        dev.h_mag2 > 0.0
            ? std::pow(dev.dist_ps, params.path_loss_exp) / dev.h_mag2
            : std::numeric_limits<double>::infinity();
  return coeff;
}

int count_direct_impl(const std::vector<Device>& devices, const std::vector<double>& alw,
                      const std::vector<double>& coeff, double l1sq,
                      const std::vector<std::uint8_t>& excluded, double compute_cost) {
  int n = 0;
  for (const Device& dev : devices) {
    const auto k = static_cast<std::size_t>(dev.id);
    if (excluded[k]) continue;
    if (compute_cost + l1sq * coeff[k] <= alw[k]) ++n;
  }
  return n;
}

Schedule assemble(const std::vector<Device>& devices, const std::vector<double>& alw,
                  const std::vector<double>& coeff, const SystemParams& params,
                  double lambda1, std::optional<double> lambda2,
                  std::vector<int> relay_ids, bool allow_direct) {
  Schedule s;
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  s.mode_flags.assign(devices.size(), 0);
  s.slack.assign(devices.size(), 0.0);
  std::sort(relay_ids.begin(), relay_ids.end());
  s.relay_set = std::move(relay_ids);
  for (int id : s.relay_set) s.mode_flags.at(static_cast<std::size_t>(id)) = 1;
  if (lambda2) s.amplify = lambda1 / (*lambda2 * std::sqrt(params.fn_mag2));

  const double compute_cost = compute_cost_of(params);
  const double l1sq = lambda1 * lambda1;
  for (const Device& dev : devices) {
    const auto k = static_cast<std::size_t>(dev.id);
    if (s.mode_flags[k]) continue;
    const double direct_need = compute_cost + l1sq * coeff[k];
    if (allow_direct && direct_need <= alw[k]) {
      s.direct_set.push_back(dev.id);
      continue;
    }
    if (allow_direct) {
      s.slack[k] = direct_need - alw[k];
    } else if (lambda2) {
      const double relay_need =
          compute_cost + tx_energy_relay(*lambda2, dev, params);
      s.slack[k] = std::max(0.0, relay_need - alw[k]);
    } else {
      // relay-only schedule with no feasible amplitude: the shared relay cap
      // blocks everyone, no finite per-device residual exists
      s.slack[k] = std::numeric_limits<double>::infinity();
    }
  }
  std::sort(s.direct_set.begin(), s.direct_set.end());
  return s;
}

struct Candidate {
  int prefix_len = 0;
  int count = -1;
  double lambda1 = 0.0;
  std::optional<double> lambda2;
};

// Shared prefix scan. with_direct toggles both the empty-prefix candidate and
// direct participation alongside a relay prefix.
Schedule scan_priorities(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params, AllowancePolicy policy,
                         bool with_direct, bool with_empty_prefix) {
  const auto alw = round_allowances(devices, ledger, round, params, policy);
  const auto coeff = direct_cost_coeffs(devices, params);
  const PriorityTable table = priorities(devices, ledger, round, params, policy);
  const double s2 = params.noise_var;
  const double floor_sq = s2 / params.mse_cap;
  const double compute_cost = compute_cost_of(params);

  std::vector<std::uint8_t> in_relay(devices.size(), 0);
  Candidate best;
  best.lambda1 = std::sqrt(floor_sq);
  if (with_empty_prefix) {
    best.count = with_direct ? count_direct_impl(devices, alw, coeff, floor_sq,
                                                 in_relay, compute_cost)
                             : 0;
  } else {
    best.count = 0;  // fallback when no prefix is feasible: schedule nobody
  }

  for (std::size_t i = 1; i <= table.order.size(); ++i) {
    const int id = table.order[i - 1];
    const double l2sq = table.psi.at(static_cast<std::size_t>(id));
    if (!(l2sq > floor_sq)) break;  // every later amplitude misses the distortion cap
    if (!relay_feasible(std::sqrt(l2sq), static_cast<int>(i), params))
      break;  // failure is monotone along the scan, nothing later can pass
    in_relay[static_cast<std::size_t>(id)] = 1;
    const double l1sq = s2 * l2sq / (params.mse_cap * l2sq - s2);
    const int direct = with_direct ? count_direct_impl(devices, alw, coeff, l1sq,
                                                       in_relay, compute_cost)
                                   : 0;
    const int count = static_cast<int>(i) + direct;
    if (count > best.count) {
      best.prefix_len = static_cast<int>(i);
      best.count = count;
      best.lambda1 = std::sqrt(l1sq);
      best.lambda2 = std::sqrt(l2sq);
    }
  }

  std::vector<int> relay_ids(table.order.begin(),
                             table.order.begin() + best.prefix_len);
  const bool direct_in_result =
      with_direct && (with_empty_prefix || best.prefix_len > 0);
  return assemble(devices, alw, coeff, params, best.lambda1, best.lambda2,
                  std::move(relay_ids), direct_in_result);
}

}  // namespace

PriorityTable priorities(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params, AllowancePolicy policy) {
  PriorityTable table;
  table.psi.assign(devices.size(), 0.0);
  std::vector<int> eligible;
  const double compute_cost = compute_cost_of(params);
  for (const Device& dev : devices) {
    const double headroom =
        round_allowance(dev, ledger, round, params, policy) - compute_cost;
    const double gain =
        dev.j_mag2 / std::pow(dev.dist_relay, params.path_loss_exp);
    table.psi.at(static_cast<std::size_t>(dev.id)) = headroom * gain;
    if (headroom > 0.0) eligible.push_back(dev.id);
  }
  std::sort(eligible.begin(), eligible.end(), [&](int a, int b) {
    const double pa = table.psi[static_cast<std::size_t>(a)];
    const double pb = table.psi[static_cast<std::size_t>(b)];
    if (pa != pb) return pa > pb;
    return a < b;
  });
  table.order = std::move(eligible);
  return table;
}

double lambda1_star(double lambda2, const SystemParams& params) {
  const double s2 = params.noise_var;
  const double l2sq = lambda2 * lambda2;
  const double denom = params.mse_cap * l2sq - s2;
  if (!(denom > 0.0))
    throw std::domain_error(
        "lambda1_star: mse-infeasible, lambda2 must exceed sqrt(noise_var/mse_cap)");
  return std::sqrt(s2 * l2sq / denom);
}

bool relay_feasible(double lambda2, int relay_set_size, const SystemParams& params) {
  const double s2 = params.noise_var;
  const double l2sq = lambda2 * lambda2;
  const double denom = params.mse_cap * l2sq - s2;
  if (!(denom > 0.0))
    throw std::domain_error(
        "relay_feasible: lambda2 must exceed sqrt(noise_var/mse_cap)");
  return params.relay_budget * params.fn_mag2 >=
         s2 * (relay_set_size * l2sq + s2) / denom;
}

int count_direct_eligible(const std::vector<Device>& devices,
                          const std::vector<double>& allowances, double lambda1,
                          const std::vector<std::uint8_t>& excluded,
                          const SystemParams& params) {
  const auto coeff = direct_cost_coeffs(devices, params);
  return count_direct_impl(devices, allowances, coeff, lambda1 * lambda1, excluded,
                           compute_cost_of(params));
}

Schedule schedule_no_relay(const std::vector<Device>& devices, const EnergyLedger& ledger,
                           int round, const SystemParams& params,
                           AllowancePolicy policy) {
  const auto alw = round_allowances(devices, ledger, round, params, policy);
  const auto coeff = direct_cost_coeffs(devices, params);
  const double lambda1 = std::sqrt(params.noise_var / params.mse_cap);
  return assemble(devices, alw, coeff, params, lambda1, std::nullopt, {}, true);
}

Schedule schedule_greedy(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params, AllowancePolicy policy) {
  return scan_priorities(devices, ledger, round, params, policy,
                         /*with_direct=*/true, /*with_empty_prefix=*/true);
}

Schedule schedule_all_relay(const std::vector<Device>& devices,
                            const EnergyLedger& ledger, int round,
                            const SystemParams& params) {
  return scan_priorities(devices, ledger, round, params,
                         AllowancePolicy::kFixedPerRound,
                         /*with_direct=*/false, /*with_empty_prefix=*/false);
}

namespace detail {
Schedule schedule_greedy_skip_direct_candidate(const std::vector<Device>& devices,
                                               const EnergyLedger& ledger, int round,
                                               const SystemParams& params) {
  return scan_priorities(devices, ledger, round, params, AllowancePolicy::kDynamic,
                         /*with_direct=*/true, /*with_empty_prefix=*/false);
}
}  // namespace detail

const std::map<std::string, SchemeFn>& scheme_registry() {
  static const std::map<std::string, SchemeFn> registry = {
      {"proposed",
       [](const std::vector<Device>& d, const EnergyLedger& l, int r,
          const SystemParams& p) {
         return schedule_greedy(d, l, r, p, AllowancePolicy::kDynamic);
       }},
      {"no-relay",
       [](const std::vector<Device>& d, const EnergyLedger& l, int r,
          const SystemParams& p) {
         return schedule_no_relay(d, l, r, p, AllowancePolicy::kFixedPerRound);
       }},
      {"all-relay",
       [](const std::vector<Device>& d, const EnergyLedger& l, int r,
          const SystemParams& p) { return schedule_all_relay(d, l, r, p); }},
      {"ideal-relay",
       [](const std::vector<Device>& d, const EnergyLedger& l, int r,
          const SystemParams& p) {
         SystemParams pinned = p;
         pinned.fn_mag2 = 1.0;
         return schedule_all_relay(d, l, r, pinned);
       }},
  };
  return registry;
}

std::vector<std::string> scheme_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : scheme_registry()) names.push_back(name);
  return names;
}

AllowancePolicy scheme_policy(const std::string& name) {
  return name == "proposed" ? AllowancePolicy::kDynamic
                            : AllowancePolicy::kFixedPerRound;
}

}  // namespace airsched
