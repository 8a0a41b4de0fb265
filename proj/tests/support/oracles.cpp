#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace geosw::oracles {

double quantile_w2_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      const SupportModel& support) {
  if (support.dim() != 1) throw InvalidInput("quantile_w2_1d: 1D only");
  const int n = support.size();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return support.points(a, 0) < support.points(b, 0); });

  std::vector<double> xa, wa, xb, wb;
  for (int k : order) {
    if (mu.weights[k] > 0.0) {
      xa.push_back(support.points(k, 0));
      wa.push_back(mu.weights[k]);
    }
    if (nu.weights[k] > 0.0) {
      xb.push_back(support.points(k, 0));
      wb.push_back(nu.weights[k]);
    }
  }
  const double ta = std::accumulate(wa.begin(), wa.end(), 0.0);
  const double tb = std::accumulate(wb.begin(), wb.end(), 0.0);

  // Walk the merged CDF breakpoints; on each quantile segment the two
  // inverse CDFs are the constants xa[i], xb[j].
  double cost = 0.0, level = 0.0, ca = wa[0] / ta, cb = wb[0] / tb;
  std::size_t i = 0, j = 0;
  while (level < 1.0) {
    const double next = std::min(std::min(ca, cb), 1.0);
    const double d = xa[i] - xb[j];
    cost += (next - level) * d * d;
    if (next >= 1.0) break;
    bool advanced = false;
    if (ca <= next && i + 1 < xa.size()) {
      ++i;
      ca += wa[i] / ta;
      advanced = true;
    }
    if (cb <= next && j + 1 < xb.size()) {
      ++j;
      cb += wb[j] / tb;
      advanced = true;
    }
    if (!advanced) break;  // cumulative rounding left both marginals short of 1
    level = next;
  }
  return cost;
}

double brute_force_assignment_cost(const Eigen::MatrixXd& cost) {
  const int m = static_cast<int>(cost.rows());
  if (m > 9) throw InvalidInput("brute_force_assignment_cost: too large");
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int k = 0; k < m; ++k) total += cost(k, perm[k]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Eigen::VectorXd softmax_long_double(const Eigen::VectorXd& logits) {
  long double shift = logits[0];
  for (int k = 1; k < logits.size(); ++k) {
    shift = std::max<long double>(shift, static_cast<long double>(logits[k]));
  }
  std::vector<long double> e(logits.size());
  long double total = 0.0L;
  for (int k = 0; k < logits.size(); ++k) {
    e[k] = expl(static_cast<long double>(logits[k]) - shift);
    total += e[k];
  }
  Eigen::VectorXd out(logits.size());
  for (int k = 0; k < logits.size(); ++k) out[k] = static_cast<double>(e[k] / total);
  return out;
}

}  // namespace geosw::oracles
