#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "airsched/rng.hpp"

using namespace airsched;

TEST_CASE("same key reproduces the same sequence") {
  KeyedRng a(7, Stream::kChannelToPs, 3, 9);
  KeyedRng b(7, Stream::kChannelToPs, 3, 9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams and indices decorrelate") {
  std::set<std::uint64_t> first_draws;
  first_draws.insert(KeyedRng(7, Stream::kChannelToPs, 0).next_u64());
  first_draws.insert(KeyedRng(7, Stream::kChannelToRelay, 0).next_u64());
  first_draws.insert(KeyedRng(7, Stream::kChannelToPs, 1).next_u64());
  first_draws.insert(KeyedRng(8, Stream::kChannelToPs, 0).next_u64());
  CHECK(first_draws.size() == 4);
}

TEST_CASE("uniform stays in [0,1) with the right mean") {
  KeyedRng rng(42, Stream::kPlacement);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("exponential draws have unit mean") {
  KeyedRng rng(42, Stream::kChannelToPs);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  CHECK(std::abs(sum / n - 1.0) < 0.01);
}

TEST_CASE("normal draws have zero mean and unit variance") {
  KeyedRng rng(42, Stream::kAggregationNoise);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 3.5 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 3.5 * std::sqrt(2.0 / n));
}

TEST_CASE("below covers the whole range without bias at small bounds") {
  KeyedRng rng(3, Stream::kMiniBatch);
  int counts[5] = {0, 0, 0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(5)];
  for (int c : counts) CHECK(std::abs(c - n / 5) < 5 * std::sqrt(n * 0.2 * 0.8));
  CHECK_THROWS(rng.below(0));
}

TEST_CASE("derive_seed separates every key component") {
  CHECK(derive_seed(1, Stream::kTrial, 0) != derive_seed(1, Stream::kTrial, 1));
  CHECK(derive_seed(1, Stream::kTrial, 0, 1) != derive_seed(1, Stream::kTrial, 1, 0));
  CHECK(derive_seed(1, Stream::kTrial) != derive_seed(2, Stream::kTrial));
}
