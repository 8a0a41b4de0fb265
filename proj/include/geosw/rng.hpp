#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "geosw/common.hpp"

namespace geosw {

enum class SimplexSampler {
  ExponentialGaps,    // normalized unit exponentials; uniform on the simplex
  NormalizedUniform,  // raw uniforms divided by their sum; not uniform
};

/// Deterministic random stream. Identical seeds give identical sequences:
/// every double is derived from raw 64-bit draws, never from std::
/// distributions (whose output is implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream for job `stream` of a master seed. Used to keep
  /// parallel or reordered jobs reproducible.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in {0, ..., n-1}, bias-free via rejection.
  std::size_t index(std::size_t n);

  /// Unit-rate exponential.
  double exponential() { return -std::log1p(-uniform()); }

  /// Standard normal (Box-Muller, both draws consumed every call).
  double normal();

  /// Random point on the m-simplex.
  Eigen::VectorXd simplex(int m, SimplexSampler sampler = SimplexSampler::ExponentialGaps);

  /// Index drawn proportionally to nonnegative weights. Throws InvalidInput
  /// if all weights vanish.
  std::size_t categorical(const Eigen::VectorXd& weights);

private:
  std::mt19937_64 engine_;
};

}  // namespace geosw
