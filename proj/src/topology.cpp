#include "airsched/topology.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace airsched {

double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double mse_cap_from_db(double gamma_db) { return std::pow(10.0, gamma_db / 10.0); }

std::vector<std::string> SystemParams::validate() const {
  std::vector<std::string> errs;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      errs.push_back(std::string("system.") + name + ": must be finite and > 0");
  };
  if (num_devices < 0) errs.push_back("system.num_devices: must be >= 0");
  positive(cell_radius, "cell_radius");
  positive(noise_var, "noise_var");
  positive(mse_cap, "mse_cap");
  positive(path_loss_exp, "path_loss_exp");
  if (compute_per_sample < 0.0 || !std::isfinite(compute_per_sample))
    errs.push_back("system.compute_per_sample: must be finite and >= 0");
  if (batch_size < 1) errs.push_back("system.batch_size: must be >= 1");
  if (total_rounds < 1) errs.push_back("system.total_rounds: must be >= 1");
  positive(device_budget, "device_budget");
  positive(relay_budget, "relay_budget");
  positive(fn_mag2, "fn_mag2");
  if (!std::isfinite(relay_pos.x) || !std::isfinite(relay_pos.y))
    errs.push_back("system.relay_pos: coordinates must be finite");
  return errs;
}

bool valid_position(const Point2D& p, const SystemParams& params) {
  const Point2D ps{0.0, 0.0};
  return distance(p, ps) > 0.0 && distance(p, params.relay_pos) > 0.0;
}

std::vector<Device> place_devices(std::uint64_t seed, const SystemParams& params) {
  std::vector<Device> devices;
  devices.reserve(static_cast<std::size_t>(params.num_devices));
  for (int k = 0; k < params.num_devices; ++k) {
    KeyedRng rng(seed, Stream::kPlacement, static_cast<std::uint64_t>(k));
    Point2D pos;
    do {
      const double radius = params.cell_radius * std::sqrt(rng.uniform());
      const double angle = 0.5 * std::numbers::pi * rng.uniform();
      pos = {radius * std::cos(angle), radius * std::sin(angle)};
    } while (!valid_position(pos, params));
    Device dev;
    dev.id = k;
    dev.position = pos;
    dev.total_budget = params.device_budget;
    dev.dist_ps = distance(pos, {0.0, 0.0});
    dev.dist_relay = distance(pos, params.relay_pos);
    devices.push_back(dev);
  }
  return devices;
}

void draw_channels(std::uint64_t seed, int round, std::vector<Device>& devices) {
  for (Device& dev : devices) {
    KeyedRng h(seed, Stream::kChannelToPs, static_cast<std::uint64_t>(round),
               static_cast<std::uint64_t>(dev.id));
    KeyedRng j(seed, Stream::kChannelToRelay, static_cast<std::uint64_t>(round),
               static_cast<std::uint64_t>(dev.id));
    dev.h_mag2 = h.exponential();
    dev.j_mag2 = j.exponential();
  }
}

double draw_relay_gain(std::uint64_t seed, int round, const SystemParams& params,
                       bool redraw) {
  if (!redraw) return params.fn_mag2;
  KeyedRng f(seed, Stream::kRelayToPs, static_cast<std::uint64_t>(round));
  return params.fn_mag2 * f.exponential();
}

std::uint64_t channel_digest(const std::vector<Device>& devices, double relay_gain) {
  auto absorb = [](std::uint64_t h, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    return mix64(h ^ bits);
  };
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (const Device& dev : devices) {
    h = absorb(h, dev.h_mag2);
    h = absorb(h, dev.j_mag2);
  }
  return absorb(h, relay_gain);
}

}  // namespace airsched
