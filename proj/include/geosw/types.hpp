#pragma once

#include <Eigen/Core>

#include "geosw/common.hpp"

namespace geosw {

/// Absolute tolerance on probability-vector sums. Inputs within it are
/// renormalized on ingestion, outside it rejected.
inline constexpr double kSimplexTol = 1e-9;

/// Floor applied to weights before taking logs.
inline constexpr double kLogFloor = 1e-300;

/// Fixed finite support shared by all measures: the points, their pairwise
/// squared Euclidean costs, and the entropic kernel exp(-cost/epsilon).
struct SupportModel {
  Eigen::MatrixXd points;  // N x d
  Eigen::MatrixXd cost;    // N x N, symmetric, zero diagonal
  Eigen::MatrixXd kernel;  // N x N, exp(-cost/epsilon), unit diagonal
  double epsilon = 0.0;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  double log_kernel(int i, int j) const { return -cost(i, j) / epsilon; }
};

/// Builds the cost and kernel matrices for a set of support points.
/// Throws InvalidInput on inconsistent dimensions or epsilon <= 0, and
/// NumericalError when epsilon is so small that the kernel entry of the
/// farthest pair leaves the normal double range.
SupportModel build_support(const Eigen::MatrixXd& points, double epsilon);

/// Default entropic regularization: 0.002 x max pairwise cost (1.0 for a
/// degenerate support where all points coincide).
double default_epsilon(const Eigen::MatrixXd& points);

/// Probability vector over a shared fixed support.
struct DiscreteMeasure {
  Eigen::VectorXd weights;

  /// Validates nonnegativity and sum-to-one within kSimplexTol, then
  /// renormalizes exactly.
  static DiscreteMeasure from_weights(const Eigen::VectorXd& w);

  /// Point mass at support index `at`.
  static DiscreteMeasure dirac(int n, int at);

  int size() const { return static_cast<int>(weights.size()); }
};

/// Unconstrained logits mapped to atoms and weights by row softmax.
struct LatentParams {
  Eigen::MatrixXd alpha;  // n x m, weight logits
  Eigen::MatrixXd beta;   // m x N, atom logits

  /// Throws NumericalError if any entry is NaN or infinite.
  void check_finite() const;
};

/// n rows on the m-simplex.
struct CoefficientMatrix {
  Eigen::MatrixXd rows;

  static CoefficientMatrix from_rows(const Eigen::MatrixXd& rows);
  static CoefficientMatrix one_hot(int n, int m, const std::vector<int>& assignment);

  int n() const { return static_cast<int>(rows.rows()); }
  int m() const { return static_cast<int>(rows.cols()); }
};

/// Row-wise softmax with max subtraction. Shift-invariant per row; throws
/// InvalidInput on NaN entries.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);
Eigen::VectorXd softmax_row(const Eigen::VectorXd& logits);

/// log(softmax(x)) computed as x - logsumexp(x); never produces -inf for
/// finite input.
Eigen::VectorXd log_softmax_row(const Eigen::VectorXd& logits);

/// log(max(w, kLogFloor)) elementwise; counts floored entries into `floored`
/// when given.
Eigen::VectorXd floored_log(const Eigen::VectorXd& w, long* floored = nullptr);

}  // namespace geosw
