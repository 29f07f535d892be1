#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "airsched/harness.hpp"
#include "airsched/oracle.hpp"
#include "airsched/scheduler.hpp"

using namespace airsched;

namespace {

Device make_device(int id, double d, double r, double h2, double j2, double budget = 5.0) {
  Device dev;
  dev.id = id;
  dev.dist_ps = d;
  dev.dist_relay = r;
  dev.h_mag2 = h2;
  dev.j_mag2 = j2;
  dev.total_budget = budget;
  return dev;
}

SystemParams cell_params(int k) {
  SystemParams p;
  p.num_devices = k;
  return p;
}

}  // namespace

TEST_CASE("priority values and ordering") {
  SystemParams params = cell_params(1);
  params.total_rounds = 100;
  params.compute_per_sample = 0.0;
  std::vector<Device> devices{make_device(0, 10, 1.0, 1.0, 2.0)};
  EnergyLedger ledger(1);
  const auto table = priorities(devices, ledger, 0, params);
  // allowance 0.05, r^-alpha = 1, j^2 = 2
  CHECK(table.psi[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(table.order == std::vector<int>{0});
}

TEST_CASE("exhausted devices drop out of the priority order") {
  SystemParams params = cell_params(2);
  std::vector<Device> devices{make_device(0, 10, 10, 1, 1), make_device(1, 10, 10, 1, 1)};
  EnergyLedger ledger(2);
  ledger.spent[0] = devices[0].total_budget;
  const auto table = priorities(devices, ledger, 3, params);
  CHECK(table.order == std::vector<int>{1});
}

TEST_CASE("priority order matches an independent sort") {
  SystemParams params = cell_params(4);
  std::vector<Device> devices{
      make_device(0, 10, 40.0, 1, 0.5), make_device(1, 10, 20.0, 1, 2.0),
      make_device(2, 10, 30.0, 1, 1.0), make_device(3, 10, 20.0, 1, 0.1)};
  EnergyLedger ledger(4);
  const auto table = priorities(devices, ledger, 0, params);

  std::vector<std::pair<double, int>> expect;
  for (const Device& dev : devices) {
    const double alw = dev.total_budget / params.total_rounds;
    expect.emplace_back(alw * dev.j_mag2 * std::pow(dev.dist_relay, -3.0), dev.id);
  }
  std::sort(expect.begin(), expect.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  REQUIRE(table.order.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(table.order[i] == expect[i].second);
}

TEST_CASE("closed-form lambda1") {
  SystemParams params;
  params.noise_var = 1.0;
  params.mse_cap = 3.0;
  CHECK(lambda1_star(1.0, params) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  // limit: large lambda2 approaches the no-relay floor
  CHECK(lambda1_star(1e9, params) ==
        doctest::Approx(std::sqrt(params.noise_var / params.mse_cap)).epsilon(1e-6));

  // symmetric point lambda2^2 = 2 sigma^2 / cap splits the distortion evenly
  const double l2 = std::sqrt(2.0 * params.noise_var / params.mse_cap);
  const double l1 = lambda1_star(l2, params);
  CHECK(l1 * l1 == doctest::Approx(2.0 * params.noise_var / params.mse_cap).epsilon(1e-12));
  const double mse = params.noise_var / (l1 * l1) + params.noise_var / (l2 * l2);
  CHECK(mse == doctest::Approx(params.mse_cap).epsilon(1e-12));

  // at or below the floor the distortion cap is unsatisfiable
  CHECK_THROWS_AS(lambda1_star(std::sqrt(params.noise_var / params.mse_cap), params),
                  std::domain_error);
}

TEST_CASE("relay feasibility boundary is inclusive") {
  SystemParams params;
  params.noise_var = 2.0;
  params.mse_cap = 4.0;
  params.fn_mag2 = 1.0;
  // RHS at lambda2 = 1, one relay device: 2*(1+2)/(4-2) = 3
  params.relay_budget = 3.0;
  CHECK(relay_feasible(1.0, 1, params));
  params.relay_budget = std::nextafter(3.0, 0.0);
  CHECK_FALSE(relay_feasible(1.0, 1, params));
  params.relay_budget = 1e9;
  CHECK(relay_feasible(1.0, 1, params));
  CHECK_THROWS_AS(relay_feasible(0.1, 1, params), std::domain_error);
}

TEST_CASE("relay feasibility fails monotonically along the priority scan") {
  for (std::uint64_t n = 0; n < 200; ++n) {
    const RandomInstance inst = make_random_instance(404, n, 10);
    const auto table =
        priorities(inst.devices, inst.ledger, inst.round, inst.params);
    const double floor_sq = inst.params.noise_var / inst.params.mse_cap;
    bool failed = false;
    for (std::size_t i = 1; i <= table.order.size(); ++i) {
      const double l2sq = table.psi[static_cast<std::size_t>(table.order[i - 1])];
      if (!(l2sq > floor_sq)) break;
      const bool ok = relay_feasible(std::sqrt(l2sq), static_cast<int>(i), inst.params);
      if (failed) CHECK_FALSE(ok);
      if (!ok) failed = true;
    }
  }
}

TEST_CASE("no-relay schedule admits exactly the devices that afford the floor") {
  SystemParams params = cell_params(4);
  params.noise_var = 1e-6;
  params.mse_cap = std::pow(10.0, 0.5);
  CHECK(params.noise_var / params.mse_cap ==
        doctest::Approx(3.1622776601683794e-7).epsilon(1e-12));

  std::vector<Device> devices{
      make_device(0, 20, 10, 1.0, 1),    // d^3/h^2 = 8e3, affordable
      make_device(1, 60, 10, 1.0, 1),    // 2.16e5, too costly
      make_device(2, 60, 10, 2.0, 1),    // 1.08e5, affordable
      make_device(3, 100, 10, 0.1, 1)};  // 1e7, too costly
  EnergyLedger ledger(4);
  const Schedule s = schedule_no_relay(devices, ledger, 0, params);
  CHECK(s.lambda1 == std::sqrt(params.noise_var / params.mse_cap));
  CHECK(s.direct_set == std::vector<int>{0, 2});
  CHECK(s.relay_set.empty());
  CHECK_FALSE(s.lambda2.has_value());
  CHECK(s.slack[0] == 0.0);
  CHECK(s.slack[1] > 0.0);
  CHECK(verify_schedule(s, devices, ledger, 0, params));

  // dead direct channels empty the schedule
  for (Device& dev : devices) dev.h_mag2 = 0.0;
  const Schedule empty = schedule_no_relay(devices, ledger, 0, params);
  CHECK(empty.scheduled_count() == 0);
}

TEST_CASE("greedy on an empty cell") {
  SystemParams params = cell_params(0);
  EnergyLedger ledger(0);
  const Schedule s = schedule_greedy({}, ledger, 0, params);
  CHECK(s.scheduled_count() == 0);
  CHECK(s.lambda1 == std::sqrt(params.noise_var / params.mse_cap));
}

TEST_CASE("greedy without relay candidates reduces to the no-relay schedule") {
  SystemParams params = cell_params(3);
  std::vector<Device> devices{make_device(0, 20, 10, 1, 0.0),
                              make_device(1, 40, 20, 2, 0.0),
                              make_device(2, 90, 30, 0.2, 0.0)};
  EnergyLedger ledger(3);
  const Schedule greedy = schedule_greedy(devices, ledger, 0, params);
  const Schedule direct = schedule_no_relay(devices, ledger, 0, params);
  CHECK(greedy.direct_set == direct.direct_set);
  CHECK(greedy.relay_set.empty());
  CHECK(greedy.lambda1 == direct.lambda1);
}

TEST_CASE("equal-count candidates resolve to fewer relay devices") {
  SystemParams params = cell_params(1);
  std::vector<Device> devices{make_device(0, 10, 10, 1.0, 1.0)};
  EnergyLedger ledger(1);
  const Schedule s = schedule_greedy(devices, ledger, 0, params);
  CHECK(s.scheduled_count() == 1);
  CHECK(s.relay_set.empty());  // the direct-only candidate ties and wins
  CHECK(s.direct_set == std::vector<int>{0});
}

TEST_CASE("every scheme output passes the validator on random instances") {
  for (std::uint64_t n = 0; n < 300; ++n) {
    const RandomInstance inst = make_random_instance(11, n, 12);
    const Schedule greedy =
        schedule_greedy(inst.devices, inst.ledger, inst.round, inst.params);
    CHECK(verify_schedule(greedy, inst.devices, inst.ledger, inst.round, inst.params));

    const Schedule direct =
        schedule_no_relay(inst.devices, inst.ledger, inst.round, inst.params,
                          AllowancePolicy::kFixedPerRound);
    CHECK(verify_schedule(direct, inst.devices, inst.ledger, inst.round, inst.params,
                          AllowancePolicy::kFixedPerRound));

    const Schedule relay_only =
        schedule_all_relay(inst.devices, inst.ledger, inst.round, inst.params);
    CHECK(verify_schedule(relay_only, inst.devices, inst.ledger, inst.round, inst.params,
                          AllowancePolicy::kFixedPerRound));

    // relay members satisfy their power bound at the common amplitude
    if (greedy.lambda2) {
      for (int id : greedy.relay_set) {
        const Device& dev = inst.devices[static_cast<std::size_t>(id)];
        const double need = tx_energy_relay(*greedy.lambda2, dev, inst.params);
        const double cap =
            round_allowance(dev, inst.ledger, inst.round, inst.params);
        CHECK(need <= cap * (1.0 + 1e-9));
      }
      CHECK(aggregation_mse(greedy, inst.params.noise_var) ==
            doctest::Approx(inst.params.mse_cap).epsilon(1e-12));
    }
  }
}

TEST_CASE("lowering lambda2 below the prefix amplitude never grows the direct set") {
  int exercised = 0;
  for (std::uint64_t n = 0; n < 400 && exercised < 100; ++n) {
    const RandomInstance inst = make_random_instance(21, n, 12);
    const auto table = priorities(inst.devices, inst.ledger, inst.round, inst.params);
    const double floor_sq = inst.params.noise_var / inst.params.mse_cap;
    if (table.order.empty()) continue;
    const double l2sq = table.psi[static_cast<std::size_t>(table.order[0])];
    if (!(l2sq > floor_sq * 1.0001) ||
        !relay_feasible(std::sqrt(l2sq), 1, inst.params))
      continue;
    ++exercised;

    std::vector<double> allowances;
    for (const Device& dev : inst.devices)
      allowances.push_back(round_allowance(dev, inst.ledger, inst.round, inst.params));
    std::vector<std::uint8_t> excluded(inst.devices.size(), 0);
    excluded[static_cast<std::size_t>(table.order[0])] = 1;

    KeyedRng rng(500, Stream::kInstanceGen, n);
    const double lo = std::sqrt(floor_sq * 1.0001);
    const double hi = std::sqrt(l2sq);
    const double perturbed = lo + (hi - lo) * rng.uniform();
    const int at_prefix =
        count_direct_eligible(inst.devices, allowances, lambda1_star(hi, inst.params),
                              excluded, inst.params);
    const int at_perturbed =
        count_direct_eligible(inst.devices, allowances,
                              lambda1_star(perturbed, inst.params), excluded,
                              inst.params);
    CHECK(at_perturbed <= at_prefix);
  }
  CHECK(exercised == 100);
}

TEST_CASE("greedy never schedules fewer devices than the no-relay baseline") {
  for (std::uint64_t n = 0; n < 300; ++n) {
    const RandomInstance inst = make_random_instance(31, n, 12);
    const int greedy =
        schedule_greedy(inst.devices, inst.ledger, inst.round, inst.params)
            .scheduled_count();
    const int direct =
        schedule_no_relay(inst.devices, inst.ledger, inst.round, inst.params)
            .scheduled_count();
    CHECK(greedy >= direct);
  }
}

TEST_CASE("all-relay schedules nothing through a dead relay channel") {
  SystemParams params = cell_params(4);
  params.fn_mag2 = 1e-30;
  std::vector<Device> devices{make_device(0, 20, 10, 1, 1), make_device(1, 30, 15, 1, 1),
                              make_device(2, 40, 20, 1, 1), make_device(3, 50, 25, 1, 1)};
  EnergyLedger ledger(4);
  const Schedule s = schedule_all_relay(devices, ledger, 0, params);
  CHECK(s.scheduled_count() == 0);
  CHECK(s.direct_set.empty());
}

TEST_CASE("all-relay count is monotone in the relay channel gain") {
  for (std::uint64_t n = 0; n < 200; ++n) {
    RandomInstance inst = make_random_instance(41, n, 12);
    KeyedRng rng(600, Stream::kInstanceGen, n);
    SystemParams weak = inst.params;
    weak.fn_mag2 = rng.uniform();  // in (0, 1)
    if (weak.fn_mag2 == 0.0) continue;
    SystemParams ideal = inst.params;
    ideal.fn_mag2 = 1.0;
    const int with_weak =
        schedule_all_relay(inst.devices, inst.ledger, inst.round, weak).scheduled_count();
    const int with_ideal =
        schedule_all_relay(inst.devices, inst.ledger, inst.round, ideal).scheduled_count();
    CHECK(with_weak <= with_ideal);
  }
}

TEST_CASE("with equal budgets the greedy dominates the all-relay benchmark") {
  for (std::uint64_t n = 0; n < 200; ++n) {
    RandomInstance inst = make_random_instance(51, n, 12);
    inst.ledger = EnergyLedger(inst.devices.size());  // fresh budgets, round 0
    const int greedy =
        schedule_greedy(inst.devices, inst.ledger, 0, inst.params).scheduled_count();
    const int relay_only =
        schedule_all_relay(inst.devices, inst.ledger, 0, inst.params).scheduled_count();
    CHECK(relay_only <= greedy);
  }
}

TEST_CASE("scheme registry") {
  CHECK(scheme_names() ==
        std::vector<std::string>{"all-relay", "ideal-relay", "no-relay", "proposed"});
  CHECK(scheme_policy("proposed") == AllowancePolicy::kDynamic);
  CHECK(scheme_policy("no-relay") == AllowancePolicy::kFixedPerRound);

  // ideal-relay ignores the realized relay channel
  SystemParams params = cell_params(6);
  params.fn_mag2 = 1e-12;
  const auto devices = place_devices(3, params);
  auto with_channels = devices;
  draw_channels(3, 0, with_channels);
  EnergyLedger ledger(6);
  const int broken =
      scheme_registry().at("all-relay")(with_channels, ledger, 0, params).scheduled_count();
  const int pinned =
      scheme_registry().at("ideal-relay")(with_channels, ledger, 0, params).scheduled_count();
  CHECK(broken == 0);
  CHECK(pinned > 0);
}
