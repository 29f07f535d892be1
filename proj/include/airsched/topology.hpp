#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airsched/rng.hpp"

namespace airsched {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point2D& a, const Point2D& b);

// One edge device. Channel gains are stored as squared magnitudes: the
// transmit scalars pre-equalize phase, so only |h|^2, |j|^2 and the real
// distances ever enter the power formulas.
struct Device {
  int id = 0;
  Point2D position;
  double total_budget = 0.0;  // P_k, joules available over the whole run
  double h_mag2 = 0.0;        // squared channel magnitude to the PS
  double j_mag2 = 0.0;        // squared channel magnitude to the relay
  double dist_ps = 0.0;       // meters to the PS
  double dist_relay = 0.0;    // meters to the relay
};

// Physical constants of one experiment. The PS sits at the origin.
struct SystemParams {
  int num_devices = 20;
  double cell_radius = 100.0;             // meters, first-quadrant quarter disc
  Point2D relay_pos{50.0, 50.0};
  double noise_var = 1e-6;                // sigma^2, watts
  double mse_cap = 3.1622776601683795;    // gamma, linear scale
  double path_loss_exp = 3.0;             // alpha
  double compute_per_sample = 0.0;        // nu, joules per sample
  int batch_size = 32;                    // L_b
  int total_rounds = 100;                 // T
  double device_budget = 5.0;             // P_k
  double relay_budget = 1.0;              // relay power cap per round
  double fn_mag2 = 1.0;                   // mean squared relay->PS channel magnitude

  // Field-level problems; empty when the configuration is usable.
  std::vector<std::string> validate() const;
};

double mse_cap_from_db(double gamma_db);

bool valid_position(const Point2D& p, const SystemParams& params);

// Uniform placement over the quarter disc; degenerate spots (on the PS or the
// relay) are resampled. Deterministic given the seed.
std::vector<Device> place_devices(std::uint64_t seed, const SystemParams& params);

// Fresh unit-mean exponential draws of h_mag2 / j_mag2 for every device,
// keyed by (seed, round, device id) so call order never matters.
void draw_channels(std::uint64_t seed, int round, std::vector<Device>& devices);

// Realized squared relay->PS channel magnitude for the round: unit-mean
// exponential scaled by params.fn_mag2, or the fixed value when redraw is off.
double draw_relay_gain(std::uint64_t seed, int round, const SystemParams& params,
                       bool redraw);

// Fingerprint of one round's channel realization; schemes compared on the
// same round must observe the same digest.
std::uint64_t channel_digest(const std::vector<Device>& devices, double relay_gain);

}  // namespace airsched
