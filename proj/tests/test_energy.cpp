#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "airsched/energy.hpp"
#include "airsched/rng.hpp"
#include "airsched/scheduler.hpp"

using namespace airsched;

namespace {

Device make_device(int id, double d, double r, double h2, double j2, double budget) {
  Device dev;
  dev.id = id;
  dev.dist_ps = d;
  dev.dist_relay = r;
  dev.h_mag2 = h2;
  dev.j_mag2 = j2;
  dev.total_budget = budget;
  return dev;
}

bool within_ulps(double a, double b, int ulps) {
  double lo = b, hi = b;
  for (int i = 0; i < ulps; ++i) {
    lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
  }
  return a >= lo && a <= hi;
}

}  // namespace

TEST_CASE("round allowance spreads the residual budget over remaining rounds") {
  SystemParams params;
  params.total_rounds = 100;
  Device dev = make_device(0, 50, 10, 1, 1, 5.0);
  EnergyLedger ledger(1);

  CHECK(round_allowance(dev, ledger, 0, params) == 0.05);

  ledger.spent[0] = 1.0;
  CHECK(round_allowance(dev, ledger, 50, params) == doctest::Approx(0.08).epsilon(1e-15));

  ledger.spent[0] = 5.0;
  CHECK(round_allowance(dev, ledger, 50, params) == 0.0);  // exhausted budget

  ledger.spent[0] = 2.5;
  CHECK(round_allowance(dev, ledger, 10, params, AllowancePolicy::kFixedPerRound) == 0.05);

  CHECK_THROWS(round_allowance(dev, ledger, 100, params));
  CHECK_THROWS(round_allowance(dev, ledger, -1, params));
}

TEST_CASE("allowance of an idle device never decreases across rounds") {
  SystemParams params;
  params.total_rounds = 100;
  KeyedRng rng(99, Stream::kInstanceGen);
  for (int rep = 0; rep < 200; ++rep) {
    Device dev = make_device(0, 50, 10, 1, 1, 5.0);
    EnergyLedger ledger(1);
    ledger.spent[0] = rng.uniform() * dev.total_budget;
    double prev = round_allowance(dev, ledger, 0, params);
    for (int t = 1; t < params.total_rounds; ++t) {
      const double cur = round_allowance(dev, ledger, t, params);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("direct transmit energy") {
  SystemParams params;
  params.path_loss_exp = 3.0;
  CHECK(tx_energy_direct(1.0, make_device(0, 1, 1, 1, 1, 1), params) == 1.0);
  CHECK(tx_energy_direct(2.0, make_device(0, 2, 1, 0.5, 1, 1), params) ==
        doctest::Approx(64.0).epsilon(1e-15));
  CHECK(std::isinf(tx_energy_direct(1.0, make_device(0, 2, 1, 0.0, 1, 1), params)));
  CHECK_THROWS(tx_energy_direct(0.0, make_device(0, 1, 1, 1, 1, 1), params));

  // floor amplitude at the 20-device cell defaults, d = 50, |h|^2 = 1
  params.noise_var = 1e-6;
  params.mse_cap = std::pow(10.0, 0.5);
  const double lambda1 = std::sqrt(params.noise_var / params.mse_cap);
  const double expected = params.noise_var / params.mse_cap * std::pow(50.0, 3.0);
  const double got = tx_energy_direct(lambda1, make_device(0, 50, 1, 1.0, 1, 1), params);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got == doctest::Approx(3.952847075210474e-2).epsilon(1e-12));
}

TEST_CASE("relay transmit energy") {
  SystemParams params;
  params.path_loss_exp = 3.0;
  CHECK(tx_energy_relay(1.0, make_device(0, 1, 1, 1, 1, 1), params) == 1.0);
  CHECK(tx_energy_relay(0.1, make_device(0, 1, 10, 1, 2.0, 1), params) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK(std::isinf(tx_energy_relay(1.0, make_device(0, 1, 10, 1, 0.0, 1), params)));
}

TEST_CASE("transmitting at the priority amplitude spends exactly the allowance") {
  SystemParams params;
  params.total_rounds = 100;
  KeyedRng rng(7, Stream::kInstanceGen);
  for (int rep = 0; rep < 500; ++rep) {
    params.compute_per_sample = rep % 2 == 0 ? 0.0 : 1e-5;
    Device dev = make_device(0, 50.0, 5.0 + 60.0 * rng.uniform(), 1.0,
                             rng.exponential() + 1e-12, 5.0);
    EnergyLedger ledger(1);
    ledger.spent[0] = rng.uniform() * 4.0;
    const int round = static_cast<int>(rng.below(100));
    const auto table = priorities({dev}, ledger, round, params);
    if (table.order.empty()) continue;
    const double psi = table.psi[0];
    REQUIRE(psi > 0.0);
    const double spent = tx_energy_relay(std::sqrt(psi), dev, params) +
                         params.compute_per_sample * params.batch_size;
    const double allowance = round_allowance(dev, ledger, round, params);
    // four roundings separate the two sides (product, sqrt, square, divide):
    // measured worst case is 3 ulps
    CHECK(within_ulps(spent, allowance, 3));
  }
}

TEST_CASE("relay node energy") {
  SystemParams params;
  params.noise_var = 1e-6;
  params.fn_mag2 = 1.0;
  CHECK(relay_energy(1.0, 1.0, 0, params) == doctest::Approx(1e-6).epsilon(1e-15));

  params.noise_var = 1.0;
  params.fn_mag2 = 4.0;
  CHECK(relay_energy(std::sqrt(3.0), 1.0, 2, params) ==
        doctest::Approx(2.25).epsilon(1e-12));
  CHECK_THROWS(relay_energy(0.0, 1.0, 1, params));
  CHECK_THROWS(relay_energy(1.0, 1.0, -1, params));
}

TEST_CASE("charging an empty schedule leaves spent untouched") {
  SystemParams params;
  std::vector<Device> devices{make_device(0, 10, 10, 1, 1, 5)};
  EnergyLedger ledger(1);
  ledger.spent[0] = 1.25;
  Schedule empty;
  empty.lambda1 = 1.0;
  empty.mode_flags.assign(1, 0);
  empty.slack.assign(1, 1.0);
  const auto next = charge_round(empty, devices, ledger, params);
  CHECK(next.spent[0] == 1.25);
  CHECK(next.relay_spent_last_round == 0.0);
}

TEST_CASE("charging books compute plus transmit energy per mode") {
  SystemParams params;
  params.compute_per_sample = 0.0;
  params.path_loss_exp = 3.0;
  std::vector<Device> devices{make_device(0, 2, 1, 0.5, 1, 500),
                              make_device(1, 1, 2, 1, 0.5, 500)};
  EnergyLedger ledger(2);
  Schedule s;
  s.lambda1 = 2.0;
  s.lambda2 = 1.0;
  s.direct_set = {0};
  s.relay_set = {1};
  s.mode_flags = {0, 1};
  s.slack = {0.0, 0.0};
  const auto next = charge_round(s, devices, ledger, params);
  CHECK(next.spent[0] == doctest::Approx(64.0).epsilon(1e-15));   // 4 * 8 / 0.5
  CHECK(next.spent[1] == doctest::Approx(16.0).epsilon(1e-15));   // 1 * 8 / 0.5
  CHECK(next.relay_spent_last_round ==
        doctest::Approx(relay_energy(2.0, 1.0, 1, params)).epsilon(1e-15));

  params.compute_per_sample = 0.25;  // adds nu * L_b = 8 per scheduled device
  const auto with_compute = charge_round(s, devices, ledger, params);
  CHECK(with_compute.spent[0] == doctest::Approx(72.0).epsilon(1e-15));
}

TEST_CASE("a relay device at its priority amplitude is charged its whole allowance") {
  SystemParams params;
  params.total_rounds = 100;
  std::vector<Device> devices{make_device(0, 50, 30, 1.0, 0.8, 5.0)};
  EnergyLedger ledger(1);
  ledger.spent[0] = 1.5;
  const int round = 40;
  const auto table = priorities(devices, ledger, round, params);
  REQUIRE(table.order == std::vector<int>{0});

  Schedule s;
  s.lambda1 = 1e-3;
  s.lambda2 = std::sqrt(table.psi[0]);
  s.relay_set = {0};
  s.mode_flags = {1};
  s.slack = {0.0};
  const auto next = charge_round(s, devices, ledger, params);
  const double charged = next.spent[0] - ledger.spent[0];
  const double allowance = round_allowance(devices[0], ledger, round, params);
  CHECK(within_ulps(charged, allowance, 3));
}

TEST_CASE("charging past the total budget throws") {
  SystemParams params;
  std::vector<Device> devices{make_device(0, 10, 1, 1, 1, 0.5)};
  EnergyLedger ledger(1);
  Schedule s;
  s.lambda1 = 1.0;  // direct energy 1000 > budget 0.5
  s.direct_set = {0};
  s.mode_flags = {0};
  s.slack = {0.0};
  CHECK_THROWS_AS(charge_round(s, devices, ledger, params), std::logic_error);
}
