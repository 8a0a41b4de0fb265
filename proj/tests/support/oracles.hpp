#pragma once

// Independent reference implementations used only by tests. These must not
// call into the library paths they are checking.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "geosw/rng.hpp"
#include "geosw/types.hpp"

namespace geosw::oracles {

/// Exact squared 2-Wasserstein distance between 1D measures via the
/// quantile-function integral, evaluated by merging the two CDFs.
double quantile_w2_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const SupportModel& support);

/// Minimal assignment cost by enumerating all permutations (m <= 9).
double brute_force_assignment_cost(const Eigen::MatrixXd& cost);

/// Softmax computed in extended precision.
Eigen::VectorXd softmax_long_double(const Eigen::VectorXd& logits);

}  // namespace geosw::oracles
