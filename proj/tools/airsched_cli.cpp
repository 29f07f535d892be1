// Command-line front end: simulate | oracle-check | schedule | plotdata.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "airsched/harness.hpp"

namespace {

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<std::string> out) {
  airsched::ExperimentConfig config = airsched::load_config(config_path);
  if (seed) config.master_seed = *seed;
  if (out) config.output_path = *out;
  const auto records = airsched::run_experiment(config);
  const std::string path = airsched::resolve_output_path(config.output_path);
  airsched::emit_csv(records, path);
  std::cout << "wrote " << records.size() << " records to " << path << "\n";
  return 0;
}

int run_oracle_check_cmd(int instances, int k_max, std::uint64_t seed,
                         const std::string& dump_dir, const std::string& replay_path) {
  if (!replay_path.empty()) {
    std::ifstream in(replay_path);
    if (!in) {
      std::cerr << "cannot read " << replay_path << "\n";
      return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::cout << airsched::replay_oracle_instance(buf.str());
    return 0;
  }
  const auto report = airsched::run_oracle_check(instances, k_max, seed);
  std::cout << "instances: " << report.instances << "\n"
            << "mismatches: " << report.mismatches << "\n";
  if (report.mismatches > 0) {
    const std::string dir = airsched::resolve_output_path(dump_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < report.mismatch_dumps.size(); ++i) {
      const std::string path =
          (std::filesystem::path(dir) / ("oracle_mismatch_" + std::to_string(i) + ".json"))
              .string();
      std::ofstream out(path);
      out << report.mismatch_dumps[i];
      std::cout << "dumped " << path << "\n";
    }
    return 1;
  }
  return 0;
}

int run_schedule_cmd(const std::string& config_path, int round, const std::string& scheme,
                     int trial) {
  const airsched::ExperimentConfig config = airsched::load_config(config_path);
  const airsched::Schedule schedule =
      airsched::debug_schedule_at(config, round, scheme, trial);
  std::cout << "scheme: " << scheme << "\nround:  " << round << "\ntrial:  " << trial
            << "\n"
            << airsched::describe(schedule, config.system);
  return 0;
}

int run_plotdata(const std::string& in_path, const std::string& figure,
                 std::optional<std::string> out_path) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "cannot read " << in_path << "\n";
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  airsched::PlotFigure fig;
  if (figure == "devices") {
    fig = airsched::PlotFigure::kDevices;
  } else if (figure == "power") {
    fig = airsched::PlotFigure::kPower;
  } else if (figure == "loss") {
    fig = airsched::PlotFigure::kLoss;
  } else {
    std::cerr << "unknown figure '" << figure << "' (devices|power|loss)\n";
    return 1;
  }
  const std::string pivoted = airsched::plot_pivot(buf.str(), fig);
  if (out_path) {
    const std::string path = airsched::resolve_output_path(*out_path);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << path << "\n";
      return 1;
    }
    out << pivoted;
  } else {
    std::cout << pivoted;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-assisted over-the-air aggregation: scheduling simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  auto* simulate = app.add_subcommand("simulate", "run the configured experiment");
  simulate->add_option("--config", config_path, "experiment config (JSON)")->required();
  simulate->add_option("--seed", seed_override, "override master_seed");
  simulate->add_option("--out", out_override, "override output_path");

  int instances = 1000;
  int k_max = 8;
  std::uint64_t oc_seed = 1;
  std::string dump_dir = ".";
  std::string replay_path;
  auto* oracle = app.add_subcommand(
      "oracle-check", "compare the greedy scheduler against exact enumeration");
  oracle->add_option("--instances", instances, "number of random instances");
  oracle->add_option("--k-max", k_max, "largest device count (<= 12)");
  oracle->add_option("--seed", oc_seed, "instance generator seed");
  oracle->add_option("--dump-dir", dump_dir, "where mismatch dumps go");
  oracle->add_option("--replay", replay_path, "re-run one dumped instance");

  std::string sched_config;
  int round = 0;
  std::string scheme = "proposed";
  int trial = 0;
  auto* sched = app.add_subcommand("schedule", "print one round's schedule");
  sched->add_option("--config", sched_config, "experiment config (JSON)")->required();
  sched->add_option("--round", round, "round index, 0-based")->required();
  sched->add_option("--scheme", scheme, "scheme name");
  sched->add_option("--trial", trial, "trial index");

  std::string plot_in;
  std::string figure;
  std::optional<std::string> plot_out;
  auto* plot = app.add_subcommand("plotdata", "pivot a simulation CSV for plotting");
  plot->add_option("--in", plot_in, "simulation CSV")->required();
  plot->add_option("--figure", figure, "devices|power|loss")->required();
  plot->add_option("--out", plot_out, "write here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, seed_override, out_override);
    if (oracle->parsed())
      return run_oracle_check_cmd(instances, k_max, oc_seed, dump_dir, replay_path);
    if (sched->parsed()) return run_schedule_cmd(sched_config, round, scheme, trial);
    if (plot->parsed()) return run_plotdata(plot_in, figure, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
