#pragma once

#include <vector>

#include <Eigen/Core>

#include "geosw/ot.hpp"
#include "geosw/rng.hpp"
#include "geosw/types.hpp"

namespace geosw::ad {

/// Ordered record of the primitive numerical steps of one loss evaluation:
/// stabilized kernel applications, log/softmax maps, weighted log
/// combinations, plan costs. Replaying the tape forward reproduces the
/// recorded values bitwise; the adjoint sweep visits steps in exact reverse
/// order, so gradients are exact derivatives of the recorded finite
/// computation rather than of any idealized limit.
class Tape {
public:
  enum class Op {
    Leaf,
    Softmax,
    LogSoftmax,
    KernelLse,
    Sub,
    WeightedCombine,  // sum_k lambda[k] * phi_k
    PlanCost,         // sum of plan .* cost from two log potentials
    Dot,
    Stack,            // scalars -> vector
    Affine,           // fixed-coefficient combination of scalars
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1, b = -1;
    std::vector<int> inputs;
    std::vector<double> coeffs;
    Eigen::VectorXd value;  // scalars have size 1
    // cached forward quantities reused by the adjoint pass
    Eigen::VectorXd scaled;  // KernelLse: exp(x - shift)
    double shift = 0.0;
    Eigen::VectorXd row_cc, col_cc;  // PlanCost: row/col sums of plan .* cost
  };

  explicit Tape(const SupportModel& support) : support_(&support) {}

  int leaf(const Eigen::VectorXd& value);
  int softmax(int x);
  int log_softmax(int x);
  int kernel_lse(int x);
  int sub(int a, int b);
  int weighted_combine(const std::vector<int>& phis, int lambda);
  int plan_cost(int u, int v, const Eigen::VectorXd& row_weights,
                const Eigen::VectorXd& col_weights);
  int dot(int a, int b);
  int stack(const std::vector<int>& scalars);
  int affine(const std::vector<int>& scalars, const std::vector<double>& coeffs);

  double scalar(int node) const { return nodes_[node].value[0]; }
  const Eigen::VectorXd& value(int node) const { return nodes_[node].value; }
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Reverse sweep seeding d(seed)/d(seed) = 1.
  void backward(int seed);
  const Eigen::VectorXd& adjoint(int node) const { return adjoints_[node]; }

  /// Recomputes every node from the leaves and returns the value of `node`.
  /// Bitwise equal to the recorded value.
  double replay(int node) const;

private:
  int push(Node n);
  void eval(Node& n, const std::vector<Eigen::VectorXd>& values) const;

  const SupportModel* support_;
  std::vector<Node> nodes_;
  std::vector<Eigen::VectorXd> adjoints_;
};

struct LossGrad {
  double loss = 0.0;
  Eigen::MatrixXd grad_alpha;  // n x m
  Eigen::MatrixXd grad_beta;   // m x N
  Diagnostics diagnostics;
};

/// Loss of the regularized reconstruction objective
///   sum_i W2e(bary(D, lambda_i), mu_i) + rho * sum_i sum_j lambda_ij W2e(D_j, mu_i)
/// with D = softmax_rows(beta), Lambda = softmax_rows(alpha), every
/// barycenter and distance unrolled for exactly `iters` scaling steps, and
/// its exact gradients with respect to the logits. Deterministic: the
/// reduction over data points runs in index order.
LossGrad loss_and_grad(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                       const SupportModel& support, double rho, int iters);

/// Forward pass only; same value as loss_and_grad().loss.
double loss_value(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                  const SupportModel& support, double rho, int iters);

/// Compares analytic derivatives against central differences on `probes`
/// random coordinates of (alpha, beta); returns the largest relative error,
/// where relative means |a - fd| / max(|a|, |fd|, 1e-6).
double finite_diff_check(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                         const SupportModel& support, double rho, int iters, int probes,
                         double step, Rng& rng);

}  // namespace geosw::ad
