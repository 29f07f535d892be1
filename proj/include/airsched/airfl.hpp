#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "airsched/schedule.hpp"
#include "airsched/topology.hpp"

namespace airsched {

// One device's synthetic regression data.
struct Shard {
  Eigen::MatrixXd features;  // samples x dim
  Eigen::VectorXd targets;
  int owner = 0;
};

// Global linear model. Layout: [w_0 .. w_{dim-1}, bias].
struct FlState {
  Eigen::VectorXd model;
  double learning_rate = 0.1;
  int round = 0;
};

FlState make_initial_state(int dim, double learning_rate);

// Gaussian features, planted weights, optional label noise. Deterministic
// given the seed; writes the planted [weights, bias] vector when requested.
std::vector<Shard> make_synthetic_shards(std::uint64_t seed, int num_devices, int dim,
                                         int shard_size, double label_noise,
                                         Eigen::VectorXd* true_model = nullptr);

// Mean squared-error gradient over a uniformly drawn mini-batch of
// params.batch_size distinct samples. Returns [grad_w, grad_bias].
Eigen::VectorXd local_gradient(const FlState& state, const Shard& shard,
                               std::uint64_t batch_seed, const SystemParams& params);

// Channel-sum of the scheduled gradients plus the equalized receiver noise:
// zero-mean Gaussian per coordinate with variance
// (1/lambda1^2 + 1/lambda2^2) * noise_var, the relay term present only when
// the schedule has a relay leg. gradients must follow schedule.scheduled_ids()
// order. Throws on an empty schedule.
Eigen::VectorXd aggregate_airtime(const std::vector<Eigen::VectorXd>& gradients,
                                  const Schedule& schedule, std::uint64_t noise_seed,
                                  const SystemParams& params);

// model -= learning_rate * aggregate / count; advances the round.
FlState global_update(const FlState& state, const Eigen::VectorXd& aggregate, int count);

// Sample-weighted mean of 0.5 * (prediction - target)^2 over all shards.
double global_loss(const FlState& state, const std::vector<Shard>& shards);

}  // namespace airsched
