#include "geosw/types.hpp"

#include <cfloat>
#include <cmath>
#include <string>

namespace geosw {

SupportModel build_support(const Eigen::MatrixXd& points, double epsilon) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw InvalidInput("build_support: need at least one point");
  if (points.cols() < 1) throw InvalidInput("build_support: points need at least one coordinate");
  if (!points.allFinite()) throw InvalidInput("build_support: non-finite coordinate");
  if (!(epsilon > 0.0)) throw InvalidInput("build_support: epsilon must be positive");

  SupportModel sm;
  sm.points = points;
  sm.epsilon = epsilon;
  sm.cost = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double c = (points.row(i) - points.row(j)).squaredNorm();
      sm.cost(i, j) = c;
      sm.cost(j, i) = c;
    }
  }

  // The farthest pair determines the smallest kernel entry; if it leaves the
  // normal double range the scaling iterations lose that pair entirely.
  int wi = 0, wj = 0;
  double max_cost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (sm.cost(i, j) > max_cost) {
        max_cost = sm.cost(i, j);
        wi = i;
        wj = j;
      }
    }
  }
  if (std::exp(-max_cost / epsilon) < DBL_MIN) {
    throw NumericalError(
        "build_support: kernel underflow for support pair (" + std::to_string(wi) + ", " +
        std::to_string(wj) + "): cost " + std::to_string(max_cost) + " with epsilon " +
        std::to_string(epsilon) + " gives exp(" + std::to_string(-max_cost / epsilon) + ")");
  }

  sm.kernel = (-sm.cost / epsilon).array().exp();
  return sm;
}

double default_epsilon(const Eigen::MatrixXd& points) {
  double max_cost = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    for (int j = i + 1; j < points.rows(); ++j) {
      max_cost = std::max(max_cost, (points.row(i) - points.row(j)).squaredNorm());
    }
  }
  return max_cost > 0.0 ? 0.002 * max_cost : 1.0;
}

DiscreteMeasure DiscreteMeasure::from_weights(const Eigen::VectorXd& w) {
  if (w.size() < 1) throw InvalidInput("DiscreteMeasure: empty weight vector");
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0)) {
      throw InvalidInput("DiscreteMeasure: negative or NaN weight at index " + std::to_string(i));
    }
  }
  const double total = w.sum();
  if (std::abs(total - 1.0) > kSimplexTol) {
    throw InvalidInput("DiscreteMeasure: weights sum to " + std::to_string(total));
  }
  DiscreteMeasure mu;
  mu.weights = w / total;
  return mu;
}

DiscreteMeasure DiscreteMeasure::dirac(int n, int at) {
  if (at < 0 || at >= n) throw InvalidInput("DiscreteMeasure::dirac: index out of range");
  DiscreteMeasure mu;
  mu.weights = Eigen::VectorXd::Zero(n);
  mu.weights[at] = 1.0;
  return mu;
}

void LatentParams::check_finite() const {
  if (!alpha.allFinite() || !beta.allFinite()) {
    throw NumericalError("LatentParams: non-finite logit");
  }
}

CoefficientMatrix CoefficientMatrix::from_rows(const Eigen::MatrixXd& rows) {
  for (int i = 0; i < rows.rows(); ++i) {
    DiscreteMeasure::from_weights(rows.row(i).transpose());  // validation only
  }
  CoefficientMatrix cm;
  cm.rows = rows;
  for (int i = 0; i < rows.rows(); ++i) cm.rows.row(i) /= rows.row(i).sum();
  return cm;
}

CoefficientMatrix CoefficientMatrix::one_hot(int n, int m, const std::vector<int>& assignment) {
  if (static_cast<int>(assignment.size()) != n) {
    throw InvalidInput("CoefficientMatrix::one_hot: assignment size mismatch");
  }
  CoefficientMatrix cm;
  cm.rows = Eigen::MatrixXd::Zero(n, m);
  for (int i = 0; i < n; ++i) {
    if (assignment[i] < 0 || assignment[i] >= m) {
      throw InvalidInput("CoefficientMatrix::one_hot: label out of range");
    }
    cm.rows(i, assignment[i]) = 1.0;
  }
  return cm;
}

Eigen::VectorXd softmax_row(const Eigen::VectorXd& logits) {
  if (logits.hasNaN()) throw InvalidInput("softmax: NaN input");
  const double shift = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - shift).exp();
  return e / e.sum();
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (int i = 0; i < logits.rows(); ++i) {
    out.row(i) = softmax_row(logits.row(i).transpose()).transpose();
  }
  return out;
}

Eigen::VectorXd log_softmax_row(const Eigen::VectorXd& logits) {
  if (logits.hasNaN()) throw InvalidInput("softmax: NaN input");
  const double shift = logits.maxCoeff();
  const double lse = shift + std::log((logits.array() - shift).exp().sum());
  return logits.array() - lse;
}

Eigen::VectorXd floored_log(const Eigen::VectorXd& w, long* floored) {
  Eigen::VectorXd out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] < kLogFloor) {
      out[i] = std::log(kLogFloor);
      if (floored) ++*floored;
    } else {
      out[i] = std::log(w[i]);
    }
  }
  return out;
}

}  // namespace geosw
