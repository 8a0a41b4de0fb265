#include "geosw/rng.hpp"

#include <cmath>
#include <numbers>

namespace geosw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x517cc1b727220a95ULL)));
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw InvalidInput("Rng::index: n must be positive");
  const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = next_u64();
  while (x >= bound) x = next_u64();
  return static_cast<std::size_t>(x % n);
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd Rng::simplex(int m, SimplexSampler sampler) {
  if (m < 1) throw InvalidInput("Rng::simplex: m must be positive");
  Eigen::VectorXd w(m);
  if (sampler == SimplexSampler::ExponentialGaps) {
    for (int i = 0; i < m; ++i) w[i] = exponential();
  } else {
    for (int i = 0; i < m; ++i) w[i] = uniform();
    while (w.sum() <= 0.0) {
      for (int i = 0; i < m; ++i) w[i] = uniform();
    }
  }
  return w / w.sum();
}

std::size_t Rng::categorical(const Eigen::VectorXd& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw InvalidInput("Rng::categorical: weights sum to zero");
  double target = uniform() * total;
  for (int i = 0; i < weights.size(); ++i) {
    target -= weights[i];
    if (target < 0.0) return static_cast<std::size_t>(i);
  }
  // Roundoff can exhaust the loop; return the last positively weighted index.
  for (int i = static_cast<int>(weights.size()) - 1; i >= 0; --i) {
    if (weights[i] > 0.0) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(weights.size() - 1);
}

}  // namespace geosw
