#include "geosw/ot.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace geosw::ot {

namespace detail {

KernelLse kernel_lse(const SupportModel& support, const Eigen::VectorXd& x) {
  KernelLse r;
  r.shift = x.maxCoeff();
  r.scaled = (x.array() - r.shift).exp();
  // Unit kernel diagonal keeps every component of the product positive.
  r.y = (support.kernel * r.scaled).array().log() + r.shift;
  return r;
}

Eigen::VectorXd kernel_lse_adjoint(const SupportModel& support, const Eigen::VectorXd& x,
                                   const KernelLse& fwd, const Eigen::VectorXd& ybar) {
  const int n = static_cast<int>(x.size());
  // exp(shift - y_i) can overflow when row i is dominated by far-away mass;
  // those rows get the exact per-entry form, whose exponents are always <= 0.
  constexpr double kSpreadLimit = 600.0;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  std::vector<int> slow_rows;
  for (int i = 0; i < n; ++i) {
    const double e = fwd.shift - fwd.y[i];
    if (e <= kSpreadLimit) {
      z[i] = ybar[i] * std::exp(e);
    } else {
      slow_rows.push_back(i);
    }
  }
  Eigen::VectorXd xbar = fwd.scaled.cwiseProduct(support.kernel * z);  // kernel is symmetric
  for (int i : slow_rows) {
    for (int k = 0; k < n; ++k) {
      xbar[k] += ybar[i] * std::exp(x[k] + support.log_kernel(i, k) - fwd.y[i]);
    }
  }
  return xbar;
}

Eigen::VectorXd weighted_log_combine(const std::vector<const Eigen::VectorXd*>& phis,
                                     const Eigen::VectorXd& lambda) {
  const int m = static_cast<int>(phis.size());
  if (m == 0 || lambda.size() != m) {
    throw InvalidInput("weighted_log_combine: size mismatch");
  }
  const int n = static_cast<int>(phis[0]->size());
  Eigen::VectorXd out(n);
  std::vector<double> terms(m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) terms[j] = lambda[j] * (*phis[j])[i];
    // Value-sorted accumulation: the sum only depends on the multiset of
    // terms, so jointly permuting (phis, lambda) cannot change the result.
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd weighted_log_combine(const std::vector<Eigen::VectorXd>& phis,
                                     const Eigen::VectorXd& lambda) {
  std::vector<const Eigen::VectorXd*> ptrs(phis.size());
  for (std::size_t j = 0; j < phis.size(); ++j) ptrs[j] = &phis[j];
  return weighted_log_combine(ptrs, lambda);
}

Eigen::MatrixXd plan_from_potentials(const SupportModel& support, const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& v, const Eigen::VectorXd& row_mask,
                                     const Eigen::VectorXd& col_mask) {
  const int n = support.size();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!(row_mask[i] > 0.0)) continue;
    for (int j = 0; j < n; ++j) {
      if (!(col_mask[j] > 0.0)) continue;
      pi(i, j) = std::exp(u[i] + support.log_kernel(i, j) + v[j]);
    }
  }
  return pi;
}

void sinkhorn_potentials(const SupportModel& support, const Eigen::VectorXd& log_mu,
                         const Eigen::VectorXd& log_nu, int iters, Eigen::VectorXd& u,
                         Eigen::VectorXd& v) {
  const int n = support.size();
  u = Eigen::VectorXd::Zero(n);
  v = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < iters; ++l) {
    u = log_mu - kernel_lse(support, v).y;
    v = log_nu - kernel_lse(support, u).y;
    if (!u.allFinite() || !v.allFinite()) {
      throw NumericalError("sinkhorn: scaling breakdown at iteration " + std::to_string(l + 1));
    }
  }
}

}  // namespace detail

double TransportPlan::marginal_error() const {
  const Eigen::VectorXd row = matrix.rowwise().sum();
  const Eigen::VectorXd col = matrix.colwise().sum().transpose();
  return (row - source).cwiseAbs().sum() + (col - target).cwiseAbs().sum();
}

SinkhornResult sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const SupportModel& support, int iters, CostEstimator estimator) {
  const int n = support.size();
  if (mu.size() != n || nu.size() != n) throw InvalidInput("sinkhorn: measure/support mismatch");
  if (iters < 1) throw InvalidInput("sinkhorn: iters must be positive");

  SinkhornResult res;
  const Eigen::VectorXd log_mu = floored_log(mu.weights, &res.diagnostics.floored_logs);
  const Eigen::VectorXd log_nu = floored_log(nu.weights, &res.diagnostics.floored_logs);

  Eigen::VectorXd u, v;
  detail::sinkhorn_potentials(support, log_mu, log_nu, iters, u, v);

  res.plan.matrix = detail::plan_from_potentials(support, u, v, mu.weights, nu.weights);
  res.plan.source = mu.weights;
  res.plan.target = nu.weights;
  res.marginal_error = res.plan.marginal_error();
  if (estimator == CostEstimator::PlanCost) {
    res.cost = res.plan.matrix.cwiseProduct(support.cost).sum();
  } else {
    res.cost = support.epsilon * (u.dot(mu.weights) + v.dot(nu.weights));
  }
  return res;
}

BarycenterResult ibp_barycenter(const std::vector<DiscreteMeasure>& atoms,
                                const Eigen::VectorXd& lambda, const SupportModel& support,
                                int iters) {
  const int m = static_cast<int>(atoms.size());
  const int n = support.size();
  if (m < 1) throw InvalidInput("ibp_barycenter: need at least one atom");
  if (iters < 1) throw InvalidInput("ibp_barycenter: iters must be positive");
  const Eigen::VectorXd lam = DiscreteMeasure::from_weights(lambda).weights;
  for (const auto& a : atoms) {
    if (a.size() != n) throw InvalidInput("ibp_barycenter: atom/support mismatch");
  }

  BarycenterResult res;
  std::vector<Eigen::VectorXd> log_atoms(m);
  for (int j = 0; j < m; ++j) {
    log_atoms[j] = floored_log(atoms[j].weights, &res.diagnostics.floored_logs);
  }

  std::vector<Eigen::VectorXd> lv(m, Eigen::VectorXd::Zero(n));
  std::vector<Eigen::VectorXd> phi(m);
  Eigen::VectorXd lb;
  for (int l = 0; l < iters; ++l) {
    for (int j = 0; j < m; ++j) {
      const Eigen::VectorXd lu = log_atoms[j] - detail::kernel_lse(support, lv[j]).y;
      phi[j] = detail::kernel_lse(support, lu).y;
    }
    lb = detail::weighted_log_combine(phi, lam);
    for (int j = 0; j < m; ++j) {
      lv[j] = lb - phi[j];
      if (!lv[j].allFinite()) {
        throw NumericalError("ibp_barycenter: breakdown at iteration " + std::to_string(l + 1));
      }
    }
  }

  res.barycenter = DiscreteMeasure::from_weights(softmax_row(lb));
  return res;
}

TransportMapEstimate entropic_map(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const SupportModel& support, int iters) {
  const auto sk = sinkhorn(mu, nu, support, iters);
  const int n = support.size();
  TransportMapEstimate est;
  est.diagnostics = sk.diagnostics;
  est.images = Eigen::MatrixXd::Zero(n, support.dim());
  est.valid.assign(n, false);
  for (int i = 0; i < n; ++i) {
    if (mu.weights[i] > 0.0) {
      est.valid[i] = true;
      est.images.row(i) = (sk.plan.matrix.row(i) * support.points) / mu.weights[i];
    }
  }
  return est;
}

std::vector<std::tuple<int, int, double>> monotone_coupling_1d(const DiscreteMeasure& mu,
                                                               const DiscreteMeasure& nu,
                                                               const SupportModel& support) {
  if (support.dim() != 1) throw InvalidInput("monotone_coupling_1d: support must be 1D");
  const int n = support.size();
  if (mu.size() != n || nu.size() != n) {
    throw InvalidInput("monotone_coupling_1d: measure/support mismatch");
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return support.points(a, 0) < support.points(b, 0); });

  // Cumulative masses in spatial order, rescaled so both end exactly at 1.
  std::vector<int> ia, ib;
  std::vector<double> ca, cb;
  double sa = 0.0, sb = 0.0;
  for (int k : order) {
    if (mu.weights[k] > 0.0) {
      sa += mu.weights[k];
      ia.push_back(k);
      ca.push_back(sa);
    }
    if (nu.weights[k] > 0.0) {
      sb += nu.weights[k];
      ib.push_back(k);
      cb.push_back(sb);
    }
  }
  for (double& c : ca) c /= sa;
  for (double& c : cb) c /= sb;
  ca.back() = 1.0;
  cb.back() = 1.0;

  std::vector<std::tuple<int, int, double>> coupling;
  std::size_t i = 0, j = 0;
  double last = 0.0;
  while (i < ca.size() && j < cb.size()) {
    const double next = std::min(ca[i], cb[j]);
    if (next > last) coupling.emplace_back(ia[i], ib[j], next - last);
    if (ca[i] == next) ++i;
    if (cb[j] == next) ++j;
    last = next;
  }
  return coupling;
}

DiscreteMeasure mccann_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          InterpolationCoord t, const SupportModel& support) {
  if (support.dim() != 1) throw InvalidInput("mccann_1d: support must be 1D");
  const int n = support.size();
  for (int i = 0; i + 1 < n; ++i) {
    if (!(support.points(i, 0) < support.points(i + 1, 0))) {
      throw InvalidInput("mccann_1d: grid must be strictly increasing");
    }
  }
  if (t.t == 0.0) return mu;
  if (t.t == 1.0) return nu;

  const auto coupling = monotone_coupling_1d(mu, nu, support);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto& [i, j, mass] : coupling) {
    if (i == j) {
      out[i] += mass;
      continue;
    }
    const double p = (1.0 - t.t) * support.points(i, 0) + t.t * support.points(j, 0);
    // Largest k with grid[k] <= p; masses between grid points are split to
    // preserve mass and first moment.
    int lo = 0, hi = n - 1;
    if (p <= support.points(0, 0)) {
      out[0] += mass;
      continue;
    }
    if (p >= support.points(n - 1, 0)) {
      out[n - 1] += mass;
      continue;
    }
    while (lo + 1 < hi) {
      const int mid = (lo + hi) / 2;
      if (support.points(mid, 0) <= p) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double gl = support.points(lo, 0), gr = support.points(hi, 0);
    if (p == gl) {
      out[lo] += mass;
    } else {
      const double wr = (p - gl) / (gr - gl);
      out[lo] += mass * (1.0 - wr);
      out[hi] += mass * wr;
    }
  }
  return DiscreteMeasure::from_weights(out);
}

GeodesicExtensionCheck verify_geodesic_extension(const DiscreteMeasure& mu,
                                                 const DiscreteMeasure& nu,
                                                 const DiscreteMeasure& nu_tilde,
                                                 const std::vector<InterpolationCoord>& t_samples,
                                                 const SupportModel& support, double tol) {
  const double w2_mu_nu = std::sqrt(exact_w2(mu, nu, support).cost);
  const double w2_mu_nt = std::sqrt(exact_w2(mu, nu_tilde, support).cost);
  const double w2_nu_nt = std::sqrt(exact_w2(nu, nu_tilde, support).cost);
  const double defect = std::abs(w2_mu_nt - w2_mu_nu - w2_nu_nt);
  if (defect > tol * std::max(1.0, w2_mu_nt)) {
    throw InvalidInput("verify_geodesic_extension: nu is not on the interpolation from mu to "
                       "nu_tilde (collinearity defect " +
                       std::to_string(defect) + ")");
  }

  GeodesicExtensionCheck check;
  for (const auto& tc : t_samples) {
    const DiscreteMeasure mu_t = mccann_1d(mu, nu, tc, support);
    const double d_mu = exact_w2(mu, mu_t, support).cost;
    const double d_nu = exact_w2(nu, mu_t, support).cost;
    const double d_nt = exact_w2(nu_tilde, mu_t, support).cost;
    const double s = w2_mu_nt > 0.0 ? std::sqrt(d_mu) / w2_mu_nt : 0.0;
    const double lhs = (1.0 - tc.t) * d_mu + tc.t * d_nu;
    const double rhs = (1.0 - s) * d_mu + s * d_nt;
    check.sides.emplace_back(lhs, rhs);
    check.s_values.push_back(s);
  }
  return check;
}

}  // namespace geosw::ot
