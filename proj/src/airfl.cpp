#include "airsched/airfl.hpp"

#include <cmath>
#include <stdexcept>

#include "airsched/rng.hpp"

namespace airsched {

FlState make_initial_state(int dim, double learning_rate) {
  if (dim < 1) throw std::invalid_argument("make_initial_state: dim must be >= 1");
  FlState state;
  state.model = Eigen::VectorXd::Zero(dim + 1);
  state.learning_rate = learning_rate;
  state.round = 0;
  return state;
}

std::vector<Shard> make_synthetic_shards(std::uint64_t seed, int num_devices, int dim,
                                         int shard_size, double label_noise,
                                         Eigen::VectorXd* true_model) {
  if (dim < 1 || shard_size < 1)
    throw std::invalid_argument("make_synthetic_shards: dim and shard_size must be >= 1");
  KeyedRng model_rng(seed, Stream::kShardData, 0xffffffffULL);
  Eigen::VectorXd planted(dim + 1);
  for (int i = 0; i <= dim; ++i) planted(i) = model_rng.normal();
  if (true_model != nullptr) *true_model = planted;

  std::vector<Shard> shards;
  shards.reserve(static_cast<std::size_t>(num_devices));
  for (int k = 0; k < num_devices; ++k) {
    KeyedRng rng(seed, Stream::kShardData, static_cast<std::uint64_t>(k));
    Shard shard;
    shard.owner = k;
    shard.features.resize(shard_size, dim);
    shard.targets.resize(shard_size);
    for (int i = 0; i < shard_size; ++i)
      for (int j = 0; j < dim; ++j) shard.features(i, j) = rng.normal();
    shard.targets = shard.features * planted.head(dim);
    shard.targets.array() += planted(dim);
    if (label_noise > 0.0)
      for (int i = 0; i < shard_size; ++i) shard.targets(i) += label_noise * rng.normal();
    shards.push_back(std::move(shard));
  }
  return shards;
}

Eigen::VectorXd local_gradient(const FlState& state, const Shard& shard,
                               std::uint64_t batch_seed, const SystemParams& params) {
  const auto n = static_cast<int>(shard.features.rows());
  const int dim = static_cast<int>(shard.features.cols());
  const int batch = params.batch_size;
  if (n < 1) throw std::invalid_argument("local_gradient: empty shard");
  if (batch > n) throw std::invalid_argument("local_gradient: batch larger than shard");
  if (state.model.size() != dim + 1)
    throw std::invalid_argument("local_gradient: model/shard dimension mismatch");

  // partial Fisher-Yates for a uniform batch without replacement
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  KeyedRng rng(batch_seed, Stream::kMiniBatch);
  for (int i = 0; i < batch; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }

  const auto weights = state.model.head(dim);
  const double bias = state.model(dim);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim + 1);
  for (int i = 0; i < batch; ++i) {
    const auto row = shard.features.row(idx[static_cast<std::size_t>(i)]);
    const double residual =
        row.dot(weights) + bias - shard.targets(idx[static_cast<std::size_t>(i)]);
    grad.head(dim) += residual * row.transpose();
    grad(dim) += residual;
  }
  grad /= static_cast<double>(batch);
  return grad;
}

Eigen::VectorXd aggregate_airtime(const std::vector<Eigen::VectorXd>& gradients,
                                  const Schedule& schedule, std::uint64_t noise_seed,
                                  const SystemParams& params) {
  if (schedule.scheduled_count() == 0)
    throw std::invalid_argument("aggregate_airtime: empty schedule");
  if (gradients.size() != static_cast<std::size_t>(schedule.scheduled_count()))
    throw std::invalid_argument("aggregate_airtime: gradient count mismatch");

  Eigen::VectorXd sum = gradients.front();
  for (std::size_t i = 1; i < gradients.size(); ++i) {
    if (gradients[i].size() != sum.size())
      throw std::invalid_argument("aggregate_airtime: gradient dimension mismatch");
    sum += gradients[i];
  }

  double variance = params.noise_var / (schedule.lambda1 * schedule.lambda1);
  if (schedule.lambda2)
    variance += params.noise_var / (*schedule.lambda2 * *schedule.lambda2);
  const double stddev = std::sqrt(variance);
  KeyedRng rng(noise_seed, Stream::kAggregationNoise);
  for (Eigen::Index i = 0; i < sum.size(); ++i) sum(i) += stddev * rng.normal();
  return sum;
}

FlState global_update(const FlState& state, const Eigen::VectorXd& aggregate, int count) {
  if (count < 1) throw std::invalid_argument("global_update: count must be >= 1");
  if (aggregate.size() != state.model.size())
    throw std::invalid_argument("global_update: dimension mismatch");
  FlState next = state;
  next.model -= state.learning_rate / static_cast<double>(count) * aggregate;
  next.round = state.round + 1;
  return next;
}

double global_loss(const FlState& state, const std::vector<Shard>& shards) {
  if (shards.empty()) throw std::invalid_argument("global_loss: no shards");
  const int dim = static_cast<int>(state.model.size()) - 1;
  double total = 0.0;
  long samples = 0;
  for (const Shard& shard : shards) {
    if (shard.features.cols() != dim)
      throw std::invalid_argument("global_loss: model/shard dimension mismatch");
    Eigen::VectorXd residual = shard.features * state.model.head(dim);
    residual.array() += state.model(dim);
    residual -= shard.targets;
    total += 0.5 * residual.squaredNorm();
    samples += shard.features.rows();
  }
  return total / static_cast<double>(samples);
}

}  // namespace airsched
