#include "airsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace airsched {

namespace {

constexpr int kMaxExactDevices = 12;
constexpr double kRelTol = 1e-9;

struct InstanceView {
  std::vector<double> allowance;    // by device id
  std::vector<double> psi;          // by device id
  std::vector<double> direct_cost;  // d^alpha / h^2 by device id
  std::vector<const Device*> by_id;
  double compute_cost = 0.0;
};

InstanceView view_of(const std::vector<Device>& devices, const EnergyLedger& ledger,
                     int round, const SystemParams& params, AllowancePolicy policy) {
  InstanceView v;
  const std::size_t n = devices.size();
  v.allowance.assign(n, 0.0);
  v.psi.assign(n, 0.0);
  v.direct_cost.assign(n, 0.0);
  v.by_id.assign(n, nullptr);
  v.compute_cost = params.compute_per_sample * params.batch_size;
  for (const Device& dev : devices) {
    const auto k = static_cast<std::size_t>(dev.id);
    double alw;
    if (policy == AllowancePolicy::kFixedPerRound) {
      alw = dev.total_budget / params.total_rounds;
    } else {
      const double residual = dev.total_budget - ledger.spent.at(k);
      alw = residual <= 0.0 ? 0.0 : residual / (params.total_rounds - round);
    }
    v.allowance[k] = alw;
    v.psi[k] = (alw - v.compute_cost) * dev.j_mag2 *
               std::pow(dev.dist_relay, -params.path_loss_exp);
    v.direct_cost[k] = dev.h_mag2 > 0.0
                           ? std::pow(dev.dist_ps, params.path_loss_exp) / dev.h_mag2
                           : std::numeric_limits<double>::infinity();
    v.by_id[k] = &dev;
  }
  return v;
}

int direct_count_at(const InstanceView& v, double l1sq,
                    const std::vector<std::uint8_t>& in_relay) {
  int n = 0;
  for (std::size_t k = 0; k < v.allowance.size(); ++k) {
    if (in_relay[k]) continue;
    if (v.compute_cost + l1sq * v.direct_cost[k] <= v.allowance[k]) ++n;
  }
  return n;
}

Schedule assemble_exact(const InstanceView& v, const SystemParams& params,
                        double lambda1, std::optional<double> lambda2,
                        std::vector<int> relay_ids) {
  Schedule s;
  s.lambda1 = lambda1;
  s.lambda2 = lambda2;
  const std::size_t n = v.allowance.size();
  s.mode_flags.assign(n, 0);
  s.slack.assign(n, 0.0);
  std::sort(relay_ids.begin(), relay_ids.end());
  s.relay_set = std::move(relay_ids);
  for (int id : s.relay_set) s.mode_flags[static_cast<std::size_t>(id)] = 1;
  if (lambda2) s.amplify = lambda1 / (*lambda2 * std::sqrt(params.fn_mag2));
  const double l1sq = lambda1 * lambda1;
  for (std::size_t k = 0; k < n; ++k) {
    if (s.mode_flags[k]) continue;
    const double need = v.compute_cost + l1sq * v.direct_cost[k];
    if (need <= v.allowance[k])
      s.direct_set.push_back(static_cast<int>(k));
    else
      s.slack[k] = need - v.allowance[k];
  }
  std::sort(s.direct_set.begin(), s.direct_set.end());
  return s;
}

}  // namespace

// For a fixed relay subset S every remaining degree of freedom is monotone in
// lambda2: raising it loosens the distortion cap, lowers the relay load
// sigma^2*(|S|*lambda2^2+sigma^2)/(cap*lambda2^2-sigma^2), and lowers the
// matching lambda1, which can only grow the direct set. Each member k caps
// lambda2^2 at its own psi_k, so lambda2^2 = min_{k in S} psi_k is the only
// value worth examining per subset, which makes the enumeration finite.
OracleResult solve_exact(const std::vector<Device>& devices, const EnergyLedger& ledger,
                         int round, const SystemParams& params,
                         AllowancePolicy policy) {
  const int K = static_cast<int>(devices.size());
  if (K > kMaxExactDevices)
    throw std::length_error("solve_exact: instance too large for enumeration");

  const InstanceView v = view_of(devices, ledger, round, params, policy);
  const double s2 = params.noise_var;
  const double floor_sq = s2 / params.mse_cap;

  // relay candidates must clear the distortion floor on their own
  std::vector<int> candidates;
  for (int id = 0; id < K; ++id)
    if (v.psi[static_cast<std::size_t>(id)] > floor_sq) candidates.push_back(id);
  std::sort(candidates.begin(), candidates.end());

  OracleResult result;
  std::vector<std::uint8_t> in_relay(static_cast<std::size_t>(K), 0);

  // empty relay set: floor amplitude, direct transmissions only
  const double lambda1_floor = std::sqrt(floor_sq);
  struct Best {
    int count;
    int relay_size;
    double l2sq;  // only compared between candidates of equal count and size
    double l1;
    std::optional<double> l2;
    std::vector<int> relay_ids;
  } best{direct_count_at(v, floor_sq, in_relay), 0, 0.0, lambda1_floor, std::nullopt, {}};
  result.candidates_examined = 1;

  const int n = static_cast<int>(candidates.size());
  std::vector<int> pick;
  for (int size = 1; size <= n; ++size) {
    pick.assign(static_cast<std::size_t>(size), 0);
    for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
      ++result.candidates_examined;
      double l2sq = std::numeric_limits<double>::infinity();
      for (int i : pick)
        l2sq = std::min(l2sq, v.psi[static_cast<std::size_t>(candidates[i])]);

      const double denom = params.mse_cap * l2sq - s2;
      const bool relay_ok =
          denom > 0.0 &&
          params.relay_budget * params.fn_mag2 >= s2 * (size * l2sq + s2) / denom;
      if (relay_ok) {
        const double l1sq = s2 * l2sq / denom;
        std::fill(in_relay.begin(), in_relay.end(), 0);
        for (int i : pick) in_relay[static_cast<std::size_t>(candidates[i])] = 1;
        const int count = size + direct_count_at(v, l1sq, in_relay);
        const bool better =
            count > best.count ||
            (count == best.count && size < best.relay_size) ||
            (count == best.count && size == best.relay_size && l2sq > best.l2sq);
        if (better) {
          best.count = count;
          best.relay_size = size;
          best.l2sq = l2sq;
          best.l1 = std::sqrt(l1sq);
          best.l2 = std::sqrt(l2sq);
          best.relay_ids.clear();
          for (int i : pick) best.relay_ids.push_back(candidates[i]);
        }
      }

      // next combination in lexicographic order
      int j = size - 1;
      while (j >= 0 && pick[static_cast<std::size_t>(j)] == j + n - size) --j;
      if (j < 0) break;
      ++pick[static_cast<std::size_t>(j)];
      for (int i = j + 1; i < size; ++i)
        pick[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i - 1)] + 1;
    }
  }

  result.best_schedule =
      assemble_exact(v, params, best.l1, best.l2, std::move(best.relay_ids));
  result.best_count = best.count;
  return result;
}

bool verify_schedule(const Schedule& schedule, const std::vector<Device>& devices,
                     const EnergyLedger& ledger, int round, const SystemParams& params,
                     AllowancePolicy policy) {
  std::vector<double> allowances(devices.size(), 0.0);
  for (const Device& dev : devices) {
    const auto k = static_cast<std::size_t>(dev.id);
    if (policy == AllowancePolicy::kFixedPerRound) {
      allowances[k] = dev.total_budget / params.total_rounds;
    } else {
      const double residual = dev.total_budget - ledger.spent.at(k);
      allowances[k] = residual <= 0.0 ? 0.0 : residual / (params.total_rounds - round);
    }
  }
  return verify_schedule(schedule, devices, allowances, params);
}

bool verify_schedule(const Schedule& schedule, const std::vector<Device>& devices,
                     const std::vector<double>& allowances, const SystemParams& params) {
  const std::size_t K = devices.size();
  if (schedule.mode_flags.size() != K || schedule.slack.size() != K) return false;
  if (schedule.relay_set.empty() != !schedule.lambda2.has_value()) return false;
  if (!(schedule.lambda1 > 0.0)) return false;

  std::vector<const Device*> by_id(K, nullptr);
  for (const Device& dev : devices) {
    if (dev.id < 0 || static_cast<std::size_t>(dev.id) >= K) return false;
    by_id[static_cast<std::size_t>(dev.id)] = &dev;
  }

  std::vector<std::uint8_t> seen(K, 0), relay(K, 0);
  for (int id : schedule.direct_set) {
    if (id < 0 || static_cast<std::size_t>(id) >= K || seen[id]) return false;
    seen[static_cast<std::size_t>(id)] = 1;
  }
  for (int id : schedule.relay_set) {
    if (id < 0 || static_cast<std::size_t>(id) >= K || seen[id]) return false;
    seen[static_cast<std::size_t>(id)] = 1;
    relay[static_cast<std::size_t>(id)] = 1;
  }
  for (std::size_t k = 0; k < K; ++k)
    if (schedule.mode_flags[k] != relay[k]) return false;

  const double compute_cost = params.compute_per_sample * params.batch_size;
  const double s2 = params.noise_var;
  const double l1sq = schedule.lambda1 * schedule.lambda1;

  double mse = s2 / l1sq;
  if (schedule.lambda2) {
    if (!(*schedule.lambda2 > 0.0)) return false;
    mse += s2 / (*schedule.lambda2 * *schedule.lambda2);
  }
  if (mse > params.mse_cap * (1.0 + kRelTol)) return false;

  if (!schedule.relay_set.empty()) {
    const double l2sq = *schedule.lambda2 * *schedule.lambda2;
    const double load =
        (static_cast<double>(schedule.relay_set.size()) * l1sq + l1sq / l2sq * s2) /
        params.fn_mag2;
    if (load > params.relay_budget * (1.0 + kRelTol)) return false;
  }

  for (int id : schedule.direct_set) {
    const Device* dev = by_id[static_cast<std::size_t>(id)];
    if (dev == nullptr || dev->h_mag2 <= 0.0) return false;
    const double need =
        compute_cost +
        l1sq * std::pow(dev->dist_ps, params.path_loss_exp) / dev->h_mag2;
    const double cap = allowances.at(static_cast<std::size_t>(id));
    if (need > cap * (1.0 + kRelTol) + 1e-300) return false;
  }
  for (int id : schedule.relay_set) {
    const Device* dev = by_id[static_cast<std::size_t>(id)];
    if (dev == nullptr || dev->j_mag2 <= 0.0) return false;
    const double l2sq = *schedule.lambda2 * *schedule.lambda2;
    const double need =
        compute_cost +
        l2sq * std::pow(dev->dist_relay, params.path_loss_exp) / dev->j_mag2;
    const double cap = allowances.at(static_cast<std::size_t>(id));
    if (need > cap * (1.0 + kRelTol) + 1e-300) return false;
  }

  for (std::size_t k = 0; k < K; ++k) {
    const bool scheduled = seen[k];
    if (scheduled && schedule.slack[k] != 0.0) return false;
    if (!scheduled && !(schedule.slack[k] > 0.0)) return false;
  }
  return true;
}

}  // namespace airsched
