#include "airsched/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace airsched {

using nlohmann::json;

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errs = system.validate();
  if (trials < 1) errs.push_back("trials: must be >= 1");
  if (schemes.empty()) errs.push_back("schemes: must name at least one scheme");
  const auto& registry = scheme_registry();
  for (std::size_t i = 0; i < schemes.size(); ++i)
    if (registry.find(schemes[i]) == registry.end())
      errs.push_back("schemes[" + std::to_string(i) + "]: unknown scheme '" +
                     schemes[i] + "'");
  if (fl.model_dim < 1) errs.push_back("fl.model_dim: must be >= 1");
  if (fl.shard_size < 1) errs.push_back("fl.shard_size: must be >= 1");
  if (!(fl.learning_rate > 0.0)) errs.push_back("fl.learning_rate: must be > 0");
  if (fl.label_noise < 0.0) errs.push_back("fl.label_noise: must be >= 0");
  if (fl.enabled && fl.shard_size < system.batch_size)
    errs.push_back("fl.shard_size: must be >= system.batch_size when fl is enabled");
  if (output_path.empty()) errs.push_back("output_path: must be nonempty");
  return errs;
}

namespace {

void check_keys(const json& j, const std::string& ctx,
                const std::set<std::string>& allowed, std::vector<std::string>& errs) {
  for (const auto& [key, value] : j.items())
    if (allowed.find(key) == allowed.end())
      errs.push_back(ctx + key + ": unknown key");
}

template <typename T>
void read_field(const json& j, const std::string& ctx, const char* key, T& out,
                std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    errs.push_back(ctx + key + ": wrong type");
  }
}

SystemParams parse_system(const json& j, std::vector<std::string>& errs) {
  SystemParams p;
  check_keys(j, "system.",
             {"num_devices", "cell_radius", "relay_pos", "noise_var", "mse_cap",
              "mse_cap_db", "path_loss_exp", "compute_per_sample", "batch_size",
              "total_rounds", "device_budget", "relay_budget", "fn_mag2"},
             errs);
  read_field(j, "system.", "num_devices", p.num_devices, errs);
  read_field(j, "system.", "cell_radius", p.cell_radius, errs);
  if (j.contains("relay_pos")) {
    const auto& rp = j.at("relay_pos");
    if (rp.is_array() && rp.size() == 2 && rp[0].is_number() && rp[1].is_number()) {
      p.relay_pos = {rp[0].get<double>(), rp[1].get<double>()};
    } else {
      errs.push_back("system.relay_pos: expected [x, y]");
    }
  }
  read_field(j, "system.", "noise_var", p.noise_var, errs);
  const bool has_linear = j.contains("mse_cap");
  const bool has_db = j.contains("mse_cap_db");
  if (has_linear && has_db) {
    errs.push_back("system.mse_cap: give either mse_cap or mse_cap_db, not both");
  } else if (has_db) {
    double db = 0.0;
    read_field(j, "system.", "mse_cap_db", db, errs);
    p.mse_cap = mse_cap_from_db(db);
  } else if (has_linear) {
    read_field(j, "system.", "mse_cap", p.mse_cap, errs);
  }
  read_field(j, "system.", "path_loss_exp", p.path_loss_exp, errs);
  read_field(j, "system.", "compute_per_sample", p.compute_per_sample, errs);
  read_field(j, "system.", "batch_size", p.batch_size, errs);
  read_field(j, "system.", "total_rounds", p.total_rounds, errs);
  read_field(j, "system.", "device_budget", p.device_budget, errs);
  read_field(j, "system.", "relay_budget", p.relay_budget, errs);
  read_field(j, "system.", "fn_mag2", p.fn_mag2, errs);
  return p;
}

FlParams parse_fl(const json& j, std::vector<std::string>& errs) {
  FlParams fl;
  check_keys(j, "fl.",
             {"enabled", "model_dim", "shard_size", "learning_rate", "label_noise",
              "aggregation_noise"},
             errs);
  read_field(j, "fl.", "enabled", fl.enabled, errs);
  read_field(j, "fl.", "model_dim", fl.model_dim, errs);
  read_field(j, "fl.", "shard_size", fl.shard_size, errs);
  read_field(j, "fl.", "learning_rate", fl.learning_rate, errs);
  read_field(j, "fl.", "label_noise", fl.label_noise, errs);
  read_field(j, "fl.", "aggregation_noise", fl.aggregation_noise, errs);
  return fl;
}

[[noreturn]] void throw_errors(const std::vector<std::string>& errs) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("configuration is not valid JSON: ") +
                                e.what());
  }
  std::vector<std::string> errs;
  ExperimentConfig cfg;
  check_keys(j, "",
             {"system", "schemes", "trials", "master_seed", "fl",
              "fn_redraw_per_round", "record_residuals", "output_path"},
             errs);
  if (j.contains("system")) cfg.system = parse_system(j.at("system"), errs);
  if (j.contains("fl")) cfg.fl = parse_fl(j.at("fl"), errs);
  read_field(j, "", "schemes", cfg.schemes, errs);
  read_field(j, "", "trials", cfg.trials, errs);
  read_field(j, "", "master_seed", cfg.master_seed, errs);
  read_field(j, "", "fn_redraw_per_round", cfg.fn_redraw_per_round, errs);
  read_field(j, "", "record_residuals", cfg.record_residuals, errs);
  read_field(j, "", "output_path", cfg.output_path, errs);
  if (errs.empty()) {
    const auto more = cfg.validate();
    errs.insert(errs.end(), more.begin(), more.end());
  }
  if (!errs.empty()) throw_errors(errs);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  return derive_seed(master_seed, Stream::kTrial, static_cast<std::uint64_t>(trial));
}

std::vector<RoundRecord> run_experiment(const ExperimentConfig& config) {
  if (const auto errs = config.validate(); !errs.empty()) throw_errors(errs);
  const SystemParams& system = config.system;
  const int K = system.num_devices;
  const bool learn = config.fl.enabled && K > 0;

  std::vector<RoundRecord> records;
  records.reserve(static_cast<std::size_t>(config.trials) *
                  static_cast<std::size_t>(system.total_rounds) * config.schemes.size());

  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t seed = trial_seed(config.master_seed, trial);
    std::vector<Device> devices = place_devices(seed, system);

    std::vector<Shard> shards;
    std::map<std::string, FlState> models;
    if (learn) {
      shards = make_synthetic_shards(derive_seed(seed, Stream::kShardData), K,
                                     config.fl.model_dim, config.fl.shard_size,
                                     config.fl.label_noise);
      for (const auto& scheme : config.schemes)
        models.emplace(scheme,
                       make_initial_state(config.fl.model_dim, config.fl.learning_rate));
    }

    std::map<std::string, EnergyLedger> ledgers;
    for (const auto& scheme : config.schemes)
      ledgers.emplace(scheme, EnergyLedger(static_cast<std::size_t>(K)));

    for (int round = 0; round < system.total_rounds; ++round) {
      draw_channels(seed, round, devices);
      const double relay_gain =
          draw_relay_gain(seed, round, system, config.fn_redraw_per_round);
      const std::uint64_t digest = channel_digest(devices, relay_gain);

      for (const auto& scheme : config.schemes) {
        if (channel_digest(devices, relay_gain) != digest)
          throw std::logic_error("paired channel draws diverged between schemes");

        SystemParams eff = system;
        eff.fn_mag2 = scheme == "ideal-relay" ? 1.0 : relay_gain;

        EnergyLedger& ledger = ledgers.at(scheme);
        const Schedule schedule =
            scheme_registry().at(scheme)(devices, ledger, round, eff);
        if (!verify_schedule(schedule, devices, ledger, round, eff,
                             scheme_policy(scheme)))
          throw std::logic_error("scheme '" + scheme +
                                 "' produced an infeasible schedule at round " +
                                 std::to_string(round));
        ledger = charge_round(schedule, devices, ledger, eff);

        RoundRecord rec;
        rec.trial = trial;
        rec.round = round;
        rec.scheme = scheme;
        rec.direct_count = static_cast<int>(schedule.direct_set.size());
        rec.relay_count = static_cast<int>(schedule.relay_set.size());
        rec.scheduled_count = rec.direct_count + rec.relay_count;
        rec.lambda1 = schedule.lambda1;
        rec.lambda2 = schedule.lambda2;
        rec.relay_energy = ledger.relay_spent_last_round;
        rec.mse = aggregation_mse(schedule, eff.noise_var);

        if (learn) {
          FlState& state = models.at(scheme);
          if (rec.scheduled_count > 0) {
            std::vector<Eigen::VectorXd> gradients;
            gradients.reserve(static_cast<std::size_t>(rec.scheduled_count));
            for (int id : schedule.scheduled_ids())
              gradients.push_back(local_gradient(
                  state, shards.at(static_cast<std::size_t>(id)),
                  derive_seed(seed, Stream::kMiniBatch, static_cast<std::uint64_t>(round),
                              static_cast<std::uint64_t>(id)),
                  system));
            SystemParams agg = eff;
            if (!config.fl.aggregation_noise) agg.noise_var = 0.0;
            const Eigen::VectorXd sum = aggregate_airtime(
                gradients, schedule,
                derive_seed(seed, Stream::kAggregationNoise,
                            static_cast<std::uint64_t>(round)),
                agg);
            state = global_update(state, sum, rec.scheduled_count);
          }
          rec.global_loss = global_loss(state, shards);
        }

        if (config.record_residuals) {
          rec.residuals.resize(static_cast<std::size_t>(K));
          for (const Device& dev : devices)
            rec.residuals[static_cast<std::size_t>(dev.id)] =
                dev.total_budget - ledger.spent[static_cast<std::size_t>(dev.id)];
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

double fl_initial_loss(const ExperimentConfig& config, int trial) {
  if (config.system.num_devices < 1)
    throw std::invalid_argument("fl_initial_loss: no devices configured");
  const std::uint64_t seed = trial_seed(config.master_seed, trial);
  const auto shards = make_synthetic_shards(derive_seed(seed, Stream::kShardData),
                                            config.system.num_devices,
                                            config.fl.model_dim, config.fl.shard_size,
                                            config.fl.label_noise);
  return global_loss(make_initial_state(config.fl.model_dim, config.fl.learning_rate),
                     shards);
}

RandomInstance make_random_instance(std::uint64_t seed, std::uint64_t index, int k_max) {
  if (k_max < 0) throw std::invalid_argument("make_random_instance: k_max must be >= 0");
  KeyedRng rng(seed, Stream::kInstanceGen, index);
  RandomInstance inst;
  inst.params.num_devices =
      k_max == 0 ? 0 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k_max)));
  inst.devices = place_devices(derive_seed(seed, Stream::kInstanceGen, index, 1),
                               inst.params);
  inst.round = static_cast<int>(
      rng.below(static_cast<std::uint64_t>(inst.params.total_rounds)));
  draw_channels(derive_seed(seed, Stream::kInstanceGen, index, 2), inst.round,
                inst.devices);
  inst.ledger = EnergyLedger(static_cast<std::size_t>(inst.params.num_devices));
  for (auto& spent : inst.ledger.spent) {
    const double u = rng.uniform();
    spent = u * u * inst.params.device_budget;
  }
  // realized relay->PS channel for the round
  inst.params.fn_mag2 *= std::max(rng.exponential(), 1e-300);
  return inst;
}

namespace {

json instance_to_json(const RandomInstance& inst) {
  json j;
  const SystemParams& p = inst.params;
  j["params"] = {{"num_devices", p.num_devices},
                 {"cell_radius", p.cell_radius},
                 {"relay_pos", {p.relay_pos.x, p.relay_pos.y}},
                 {"noise_var", p.noise_var},
                 {"mse_cap", p.mse_cap},
                 {"path_loss_exp", p.path_loss_exp},
                 {"compute_per_sample", p.compute_per_sample},
                 {"batch_size", p.batch_size},
                 {"total_rounds", p.total_rounds},
                 {"device_budget", p.device_budget},
                 {"relay_budget", p.relay_budget},
                 {"fn_mag2", p.fn_mag2}};
  j["round"] = inst.round;
  j["devices"] = json::array();
  for (const Device& dev : inst.devices) {
    j["devices"].push_back({{"id", dev.id},
                            {"x", dev.position.x},
                            {"y", dev.position.y},
                            {"budget", dev.total_budget},
                            {"h_mag2", dev.h_mag2},
                            {"j_mag2", dev.j_mag2},
                            {"dist_ps", dev.dist_ps},
                            {"dist_relay", dev.dist_relay},
                            {"spent", inst.ledger.spent[static_cast<std::size_t>(dev.id)]}});
  }
  return j;
}

RandomInstance instance_from_json(const json& j) {
  RandomInstance inst;
  const json& p = j.at("params");
  inst.params.num_devices = p.at("num_devices").get<int>();
  inst.params.cell_radius = p.at("cell_radius").get<double>();
  inst.params.relay_pos = {p.at("relay_pos")[0].get<double>(),
                           p.at("relay_pos")[1].get<double>()};
  inst.params.noise_var = p.at("noise_var").get<double>();
  inst.params.mse_cap = p.at("mse_cap").get<double>();
  inst.params.path_loss_exp = p.at("path_loss_exp").get<double>();
  inst.params.compute_per_sample = p.at("compute_per_sample").get<double>();
  inst.params.batch_size = p.at("batch_size").get<int>();
  inst.params.total_rounds = p.at("total_rounds").get<int>();
  inst.params.device_budget = p.at("device_budget").get<double>();
  inst.params.relay_budget = p.at("relay_budget").get<double>();
  inst.params.fn_mag2 = p.at("fn_mag2").get<double>();
  inst.round = j.at("round").get<int>();
  inst.ledger = EnergyLedger(static_cast<std::size_t>(inst.params.num_devices));
  for (const json& d : j.at("devices")) {
    Device dev;
    dev.id = d.at("id").get<int>();
    dev.position = {d.at("x").get<double>(), d.at("y").get<double>()};
    dev.total_budget = d.at("budget").get<double>();
    dev.h_mag2 = d.at("h_mag2").get<double>();
    dev.j_mag2 = d.at("j_mag2").get<double>();
    dev.dist_ps = d.at("dist_ps").get<double>();
    dev.dist_relay = d.at("dist_relay").get<double>();
    inst.ledger.spent.at(static_cast<std::size_t>(dev.id)) = d.at("spent").get<double>();
    inst.devices.push_back(dev);
  }
  return inst;
}

}  // namespace

OracleCheckReport run_oracle_check(int instances, int k_max, std::uint64_t seed,
                                   const SchemeFn& scheduler) {
  if (k_max > 12)
    throw std::invalid_argument("run_oracle_check: k_max must be <= 12");
  const SchemeFn sched =
      scheduler ? scheduler
                : SchemeFn([](const std::vector<Device>& d, const EnergyLedger& l,
                              int r, const SystemParams& p) {
                    return schedule_greedy(d, l, r, p);
                  });
  OracleCheckReport report;
  report.instances = instances;
  for (int n = 0; n < instances; ++n) {
    const RandomInstance inst =
        make_random_instance(seed, static_cast<std::uint64_t>(n), k_max);
    const Schedule greedy = sched(inst.devices, inst.ledger, inst.round, inst.params);
    const OracleResult exact =
        solve_exact(inst.devices, inst.ledger, inst.round, inst.params);
    if (greedy.scheduled_count() != exact.best_count) {
      ++report.mismatches;
      json dump = instance_to_json(inst);
      dump["instance_index"] = n;
      dump["greedy_count"] = greedy.scheduled_count();
      dump["oracle_count"] = exact.best_count;
      report.mismatch_dumps.push_back(dump.dump(2));
    }
  }
  return report;
}

std::string replay_oracle_instance(const std::string& json_text) {
  const RandomInstance inst = instance_from_json(json::parse(json_text));
  const Schedule greedy =
      schedule_greedy(inst.devices, inst.ledger, inst.round, inst.params);
  const OracleResult exact =
      solve_exact(inst.devices, inst.ledger, inst.round, inst.params);
  std::ostringstream out;
  out << "round " << inst.round << ", K=" << inst.params.num_devices << "\n";
  out << "greedy count:  " << greedy.scheduled_count() << "\n"
      << describe(greedy, inst.params);
  out << "oracle count:  " << exact.best_count << " (" << exact.candidates_examined
      << " candidates examined)\n"
      << describe(exact.best_schedule, inst.params);
  out << (greedy.scheduled_count() == exact.best_count ? "MATCH\n" : "MISMATCH\n");
  return out.str();
}

std::string render_csv(const std::vector<RoundRecord>& records) {
  if (records.empty()) throw std::invalid_argument("render_csv: no records");
  const std::size_t residuals = records.front().residuals.size();
  for (const RoundRecord& rec : records)
    if (rec.residuals.size() != residuals)
      throw std::invalid_argument("render_csv: inconsistent residual columns");

  std::string out =
      "trial,round,scheme,scheduled_count,direct_count,relay_count,lambda1,lambda2,"
      "relay_energy,mse,global_loss";
  for (std::size_t k = 0; k < residuals; ++k) out += ",residual_" + std::to_string(k);
  out += '\n';

  for (const RoundRecord& rec : records) {
    out += std::to_string(rec.trial);
    out += ',' + std::to_string(rec.round);
    out += ',' + csv_field(rec.scheme);
    out += ',' + std::to_string(rec.scheduled_count);
    out += ',' + std::to_string(rec.direct_count);
    out += ',' + std::to_string(rec.relay_count);
    out += ',' + fmt_double(rec.lambda1);
    out += ',';
    if (rec.lambda2) out += fmt_double(*rec.lambda2);
    out += ',' + fmt_double(rec.relay_energy);
    out += ',' + fmt_double(rec.mse);
    out += ',';
    if (rec.global_loss) out += fmt_double(*rec.global_loss);
    for (double r : rec.residuals) out += ',' + fmt_double(r);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<RoundRecord>& records, const std::string& path) {
  const std::string body = render_csv(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get(c);
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any && (!field.empty() || !row.empty())) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

int column_of(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::string plot_pivot(const std::string& csv_text, PlotFigure figure) {
  std::istringstream in(csv_text);
  const auto rows = parse_csv(in);
  if (rows.size() < 2) throw std::invalid_argument("plot_pivot: empty input");
  const auto& header = rows.front();
  const int c_round = column_of(header, "round");
  const int c_scheme = column_of(header, "scheme");
  if (c_round < 0 || c_scheme < 0)
    throw std::invalid_argument("plot_pivot: input is not a simulation CSV");

  // (round, key) -> running mean; key order follows first appearance
  std::map<std::pair<int, std::string>, std::pair<double, long>> acc;
  std::vector<std::string> key_order;
  auto note_key = [&](const std::string& key) {
    if (std::find(key_order.begin(), key_order.end(), key) == key_order.end())
      key_order.push_back(key);
  };

  std::string header_out;
  if (figure == PlotFigure::kDevices || figure == PlotFigure::kLoss) {
    const char* value_col = figure == PlotFigure::kDevices ? "scheduled_count" : "global_loss";
    const int c_value = column_of(header, value_col);
    if (c_value < 0)
      throw std::invalid_argument(std::string("plot_pivot: missing column ") + value_col);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      const std::string& raw = row.at(static_cast<std::size_t>(c_value));
      if (raw.empty()) continue;
      const int round = std::stoi(row.at(static_cast<std::size_t>(c_round)));
      const std::string& scheme = row.at(static_cast<std::size_t>(c_scheme));
      note_key(scheme);
      auto& [sum, count] = acc[{round, scheme}];
      sum += std::stod(raw);
      ++count;
    }
    if (acc.empty()) throw std::invalid_argument("plot_pivot: no usable values in input");
    header_out = figure == PlotFigure::kDevices ? "round,scheme,mean_scheduled_count"
                                                : "round,scheme,mean_global_loss";
  } else {
    std::vector<int> residual_cols;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i].rfind("residual_", 0) == 0) residual_cols.push_back(static_cast<int>(i));
    if (residual_cols.empty())
      throw std::invalid_argument("plot_pivot: input has no residual columns");
    std::set<std::string> schemes;
    for (std::size_t i = 1; i < rows.size(); ++i)
      schemes.insert(rows[i].at(static_cast<std::size_t>(c_scheme)));
    std::string wanted;
    if (schemes.count("proposed")) {
      wanted = "proposed";
    } else if (schemes.size() == 1) {
      wanted = *schemes.begin();
    } else {
      throw std::invalid_argument("plot_pivot: ambiguous scheme for the power figure");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.at(static_cast<std::size_t>(c_scheme)) != wanted) continue;
      const int round = std::stoi(row.at(static_cast<std::size_t>(c_round)));
      for (int col : residual_cols) {
        const std::string device =
            header[static_cast<std::size_t>(col)].substr(std::string("residual_").size());
        note_key(device);
        auto& [sum, count] = acc[{round, device}];
        sum += std::stod(row.at(static_cast<std::size_t>(col)));
        ++count;
      }
    }
    header_out = "round,device,mean_residual";
  }

  std::set<int> rounds;
  for (const auto& [key, value] : acc) rounds.insert(key.first);
  std::string out = header_out + '\n';
  for (int round : rounds) {
    for (const auto& key : key_order) {
      const auto it = acc.find({round, key});
      if (it == acc.end()) continue;
      out += std::to_string(round) + ',' + csv_field(key) + ',' +
             fmt_double(it->second.first / static_cast<double>(it->second.second)) + '\n';
    }
  }
  return out;
}

Schedule debug_schedule_at(const ExperimentConfig& config, int round,
                           const std::string& scheme, int trial) {
  if (const auto errs = config.validate(); !errs.empty()) throw_errors(errs);
  if (scheme_registry().find(scheme) == scheme_registry().end())
    throw std::invalid_argument("unknown scheme '" + scheme + "'");
  if (round < 0 || round >= config.system.total_rounds)
    throw std::invalid_argument("round out of range");
  const std::uint64_t seed = trial_seed(config.master_seed, trial);
  std::vector<Device> devices = place_devices(seed, config.system);
  EnergyLedger ledger(static_cast<std::size_t>(config.system.num_devices));
  for (int t = 0; t <= round; ++t) {
    draw_channels(seed, t, devices);
    SystemParams eff = config.system;
    eff.fn_mag2 = scheme == "ideal-relay"
                      ? 1.0
                      : draw_relay_gain(seed, t, config.system, config.fn_redraw_per_round);
    const Schedule schedule = scheme_registry().at(scheme)(devices, ledger, t, eff);
    if (t == round) return schedule;
    ledger = charge_round(schedule, devices, ledger, eff);
  }
  throw std::logic_error("unreachable");
}

std::string describe(const Schedule& schedule, const SystemParams& params) {
  std::ostringstream out;
  out << "scheduled: " << schedule.scheduled_count() << " (direct "
      << schedule.direct_set.size() << ", relay " << schedule.relay_set.size() << ")\n";
  out << "lambda1:   " << fmt_double(schedule.lambda1) << "\n";
  if (schedule.lambda2) {
    out << "lambda2:   " << fmt_double(*schedule.lambda2) << "\n";
    out << "amplify:   " << fmt_double(schedule.amplify.value_or(0.0)) << "\n";
    out << "relay_energy: "
        << fmt_double(relay_energy(schedule.lambda1, *schedule.lambda2,
                                   static_cast<int>(schedule.relay_set.size()), params))
        << " (cap " << fmt_double(params.relay_budget) << ")\n";
  }
  out << "mse:       " << fmt_double(aggregation_mse(schedule, params.noise_var))
      << " (cap " << fmt_double(params.mse_cap) << ")\n";
  auto list = [&](const char* label, const std::vector<int>& ids) {
    out << label;
    for (int id : ids) out << ' ' << id;
    out << "\n";
  };
  list("direct:   ", schedule.direct_set);
  list("relay:    ", schedule.relay_set);
  return out.str();
}

std::string resolve_output_path(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const char* base = std::getenv("AIRSCHED_OUT_DIR");
  if (base == nullptr || *base == '\0') return path;
  return (fs::path(base) / p).string();
}

}  // namespace airsched
