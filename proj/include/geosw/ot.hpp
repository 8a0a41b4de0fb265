#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "geosw/types.hpp"

namespace geosw::ot {

/// Coupling between two measures on the shared support.
struct TransportPlan {
  Eigen::MatrixXd matrix;  // pi, N x N, nonnegative
  Eigen::VectorXd source;  // intended row marginals
  Eigen::VectorXd target;  // intended column marginals

  /// L1 deviation of the plan marginals from (source, target).
  double marginal_error() const;
};

enum class CostEstimator {
  PlanCost,   // sum pi_ij C_ij of the scaled plan; always >= 0
  DualValue,  // <f, mu> + <g, nu>; cheap, may be negative
};

struct SinkhornResult {
  double cost = 0.0;
  TransportPlan plan;
  double marginal_error = 0.0;
  Diagnostics diagnostics;
};

/// Runs exactly `iters` alternating scaling updates in log-stabilized form
/// and returns the cost estimate of the resulting plan. Iteration count is
/// fixed by contract (no early exit); the marginal error is reported only.
SinkhornResult sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const SupportModel& support, int iters,
                        CostEstimator estimator = CostEstimator::PlanCost);

struct ExactResult {
  double cost = 0.0;
  TransportPlan plan;
};

/// Exact optimum of the discrete Kantorovich problem, solved by a
/// network-simplex method on the bipartite graph. Guarded to N <= 4096.
ExactResult exact_w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const SupportModel& support);

struct BarycenterResult {
  DiscreteMeasure barycenter;
  Diagnostics diagnostics;
};

/// Fixed-support entropic barycenter after exactly `iters` Bregman
/// iterations. Atom weights are floored at kLogFloor before logs; the output
/// is renormalized. Jointly permuting (atoms, lambda) leaves the output
/// unchanged bitwise.
BarycenterResult ibp_barycenter(const std::vector<DiscreteMeasure>& atoms,
                                const Eigen::VectorXd& lambda, const SupportModel& support,
                                int iters);

struct TransportMapEstimate {
  Eigen::MatrixXd images;   // N x d; images.row(i) estimates T(x_i)
  std::vector<bool> valid;  // false where the source weight is zero
  Diagnostics diagnostics;
};

/// Barycentric projection of the entropic plan:
/// images[i] = sum_k pi_ik x_k / mu_i wherever mu_i > 0.
TransportMapEstimate entropic_map(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const SupportModel& support, int iters);

/// Interpolation time on a Wasserstein geodesic.
struct InterpolationCoord {
  double t = 0.0;
  explicit InterpolationCoord(double t_) : t(t_) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("InterpolationCoord: t outside [0, 1]");
  }
};

/// Exact monotone coupling between two 1D measures as (source index, target
/// index, mass) triples in quantile order.
std::vector<std::tuple<int, int, double>> monotone_coupling_1d(const DiscreteMeasure& mu,
                                                               const DiscreteMeasure& nu,
                                                               const SupportModel& support);

/// Displacement interpolation between 1D measures on a sorted grid. Off-grid
/// point masses are split between the two nearest grid points, preserving
/// total mass and mean. t = 0 and t = 1 return mu and nu exactly.
DiscreteMeasure mccann_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          InterpolationCoord t, const SupportModel& support);

struct GeodesicExtensionCheck {
  // One (lhs, rhs) pair per requested t; the geodesic inequality asks
  // lhs <= rhs up to tolerance.
  std::vector<std::pair<double, double>> sides;
  std::vector<double> s_values;
};

/// Evaluates both sides of the geodesic-extension inequality for a 1D triple
/// where nu lies on the displacement interpolation from mu to nu_tilde.
/// Throws InvalidInput when the collinearity precondition
/// |W2(mu,nu_tilde) - W2(mu,nu) - W2(nu,nu_tilde)| exceeds `tol`.
GeodesicExtensionCheck verify_geodesic_extension(const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 const DiscreteMeasure& nu_tilde,
                                                 const std::vector<InterpolationCoord>& t_samples,
                                                 const SupportModel& support, double tol = 1e-7);

namespace detail {

/// One stabilized kernel application in log coordinates:
/// y_i = log(sum_j K_ij exp(x_j - shift)) + shift with shift = max(x).
/// `scaled` caches exp(x - shift) for the adjoint pass. Mathematically y is
/// independent of the shift, so adjoints may treat it as constant.
struct KernelLse {
  Eigen::VectorXd y;
  Eigen::VectorXd scaled;
  double shift = 0.0;
};

KernelLse kernel_lse(const SupportModel& support, const Eigen::VectorXd& x);

/// Adjoint of kernel_lse: given dL/dy, returns dL/dx. Rows whose exponent
/// spread is extreme fall back to an exact per-entry evaluation.
Eigen::VectorXd kernel_lse_adjoint(const SupportModel& support, const Eigen::VectorXd& x,
                                   const KernelLse& fwd, const Eigen::VectorXd& ybar);

/// sum_k lambda_k phi_k with per-component value-sorted accumulation, so the
/// result is invariant under jointly permuting (phis, lambda).
Eigen::VectorXd weighted_log_combine(const std::vector<Eigen::VectorXd>& phis,
                                     const Eigen::VectorXd& lambda);
Eigen::VectorXd weighted_log_combine(const std::vector<const Eigen::VectorXd*>& phis,
                                     const Eigen::VectorXd& lambda);

/// Plan entries exp(u_i + log K_ij + v_j), masked to rows/columns where the
/// true weights are nonzero.
Eigen::MatrixXd plan_from_potentials(const SupportModel& support, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& v, const Eigen::VectorXd& row_mask,
                                     const Eigen::VectorXd& col_mask);

/// Log-domain scaling loop shared by sinkhorn and the autodiff replay:
/// u <- log_mu - Klse(v), v <- log_nu - Klse(u), `iters` times from v = 0.
void sinkhorn_potentials(const SupportModel& support, const Eigen::VectorXd& log_mu,
                         const Eigen::VectorXd& log_nu, int iters, Eigen::VectorXd& u,
                         Eigen::VectorXd& v);

}  // namespace detail

}  // namespace geosw::ot
