#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "airsched/airfl.hpp"
#include "airsched/oracle.hpp"
#include "airsched/scheduler.hpp"

namespace airsched {

struct FlParams {
  bool enabled = false;
  int model_dim = 16;
  int shard_size = 256;
  double learning_rate = 0.1;
  double label_noise = 0.0;
  bool aggregation_noise = true;  // off: channel sums stay exact, scheduling unchanged
};

struct ExperimentConfig {
  SystemParams system;
  std::vector<std::string> schemes{"proposed"};
  int trials = 1;
  std::uint64_t master_seed = 1;
  FlParams fl;
  bool fn_redraw_per_round = true;
  bool record_residuals = true;
  std::string output_path = "simulation.csv";

  std::vector<std::string> validate() const;
};

struct RoundRecord {
  int trial = 0;
  int round = 0;
  std::string scheme;
  int scheduled_count = 0;
  int direct_count = 0;
  int relay_count = 0;
  double lambda1 = 0.0;
  std::optional<double> lambda2;
  double relay_energy = 0.0;
  double mse = 0.0;
  std::optional<double> global_loss;
  std::vector<double> residuals;  // remaining budget per device id after the round
};

// Parse + validate; throws std::invalid_argument listing every bad field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

// All schemes of a trial see the identical per-round channel realization and
// shard data; each owns its ledger (and model, when learning is on). Records
// come out ordered by (trial, round, scheme-as-configured).
std::vector<RoundRecord> run_experiment(const ExperimentConfig& config);

// Loss of the zero-initialized model on the trial's shards.
double fl_initial_loss(const ExperimentConfig& config, int trial);

// A random small scheduling instance; the effective fn_mag2 carries the
// round's relay-channel draw.
struct RandomInstance {
  SystemParams params;
  std::vector<Device> devices;
  EnergyLedger ledger;
  int round = 0;
};
RandomInstance make_random_instance(std::uint64_t seed, std::uint64_t index, int k_max);

struct OracleCheckReport {
  int instances = 0;
  int mismatches = 0;
  std::vector<std::string> mismatch_dumps;  // replayable JSON, one per mismatch
};

// Greedy-vs-exact comparison over random instances (k_max <= 12). A custom
// scheduler substitutes for the greedy in mutation tests.
OracleCheckReport run_oracle_check(int instances, int k_max, std::uint64_t seed,
                                   const SchemeFn& scheduler = {});

// Re-runs one dumped instance; returns a human-readable comparison.
std::string replay_oracle_instance(const std::string& json_text);

std::string render_csv(const std::vector<RoundRecord>& records);
void emit_csv(const std::vector<RoundRecord>& records, const std::string& path);
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

enum class PlotFigure { kDevices, kPower, kLoss };
// Pivots raw simulation CSV into per-figure long format (means over trials).
std::string plot_pivot(const std::string& csv_text, PlotFigure figure);

// Schedule the given scheme would emit at `round` of trial `trial`, with the
// ledger evolved through the preceding rounds.
Schedule debug_schedule_at(const ExperimentConfig& config, int round,
                           const std::string& scheme, int trial = 0);
std::string describe(const Schedule& schedule, const SystemParams& params);

// Joins relative paths onto AIRSCHED_OUT_DIR when that variable is set.
std::string resolve_output_path(const std::string& path);

}  // namespace airsched
