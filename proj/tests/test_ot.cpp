#include <cmath>

#include <doctest.h>

#include "geosw/datasets.hpp"
#include "geosw/ot.hpp"
#include "geosw/rng.hpp"
#include "support/oracles.hpp"

using namespace geosw;

namespace {

Eigen::MatrixXd points_1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd p(xs.size(), 1);
  int i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

SupportModel grid_1d(int n, double epsilon) {
  Eigen::MatrixXd p(n, 1);
  for (int i = 0; i < n; ++i) p(i, 0) = static_cast<double>(i) / (n - 1);
  return build_support(p, epsilon);
}

DiscreteMeasure random_measure(int n, Rng& rng) {
  return DiscreteMeasure::from_weights(rng.simplex(n));
}

}  // namespace

TEST_CASE("sinkhorn identity pair: cost vanishes as epsilon shrinks, exactly for diracs") {
  for (double eps : {0.1, 0.02}) {
    const auto sm = build_support(points_1d({0.0, 0.5, 1.0}), eps);
    Eigen::VectorXd w(3);
    w << 0.2, 0.5, 0.3;
    const auto mu = DiscreteMeasure::from_weights(w);
    const auto res = ot::sinkhorn(mu, mu, sm, 200);
    CHECK(res.cost < (eps == 0.1 ? 0.05 : 0.01));
  }
  const auto sm = build_support(points_1d({0.0, 0.5, 1.0}), 0.05);
  const auto d = DiscreteMeasure::dirac(3, 1);
  CHECK(ot::sinkhorn(d, d, sm, 50).cost == 0.0);
}

TEST_CASE("sinkhorn forced plan between opposite diracs") {
  const auto sm = build_support(points_1d({0.0, 1.0}), 0.02);
  const auto res =
      ot::sinkhorn(DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 1), sm, 100);
  CHECK(res.cost == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.marginal_error < 1e-12);
}

TEST_CASE("sinkhorn three-point split matches the quantile value") {
  const auto sm = build_support(points_1d({0.0, 1.0, 2.0}), 0.01);
  Eigen::VectorXd a(3), b(3);
  a << 0.5, 0.5, 0.0;
  b << 0.0, 0.5, 0.5;
  const auto mu = DiscreteMeasure::from_weights(a);
  const auto nu = DiscreteMeasure::from_weights(b);
  CHECK(oracles::quantile_w2_1d(mu, nu, sm) == doctest::Approx(1.0).epsilon(1e-12));
  const auto res = ot::sinkhorn(mu, nu, sm, 500);
  CHECK(res.cost == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sinkhorn marginal error shrinks when the iteration budget doubles") {
  Rng rng(17);
  const auto sm = grid_1d(8, 0.02);
  for (int rep = 0; rep < 5; ++rep) {
    const auto mu = random_measure(8, rng);
    const auto nu = random_measure(8, rng);
    const double e1 = ot::sinkhorn(mu, nu, sm, 4).marginal_error;
    const double e2 = ot::sinkhorn(mu, nu, sm, 8).marginal_error;
    const double e3 = ot::sinkhorn(mu, nu, sm, 16).marginal_error;
    CHECK(e2 <= e1);
    CHECK(e3 <= e2);
  }
}

TEST_CASE("sinkhorn dual estimate tracks the plan estimate near convergence") {
  Rng rng(31);
  const auto sm = grid_1d(6, 0.1);
  const auto mu = random_measure(6, rng);
  const auto nu = random_measure(6, rng);
  const double plan = ot::sinkhorn(mu, nu, sm, 3000, ot::CostEstimator::PlanCost).cost;
  const double dual = ot::sinkhorn(mu, nu, sm, 3000, ot::CostEstimator::DualValue).cost;
  // The dual value includes the entropy term, so they differ by O(eps).
  CHECK(std::abs(plan - dual) < 0.5);
}

TEST_CASE("sinkhorn input validation") {
  const auto sm = grid_1d(4, 0.05);
  const auto mu = DiscreteMeasure::dirac(4, 0);
  CHECK_THROWS_AS(ot::sinkhorn(mu, DiscreteMeasure::dirac(5, 0), sm, 10), InvalidInput);
  CHECK_THROWS_AS(ot::sinkhorn(mu, mu, sm, 0), InvalidInput);
}

TEST_CASE("exact_w2 identity and forced dirac pairs") {
  const auto sm = build_support(points_1d({0.0, 3.0}), 1.0);
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 0.0, 3.0, 4.0;
  const auto plane = build_support(p, 1.0);

  Rng rng(5);
  const auto mu = random_measure(2, rng);
  CHECK(ot::exact_w2(mu, mu, sm).cost == 0.0);
  CHECK(ot::exact_w2(DiscreteMeasure::dirac(2, 0), DiscreteMeasure::dirac(2, 1), plane).cost ==
        doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("exact_w2 on a 1D spread pair matches the quantile oracle") {
  const auto sm = build_support(points_1d({0.0, 1.0, 2.0, 3.0}), 1.0);
  Eigen::VectorXd a(4), b(4);
  a << 0.25, 0.25, 0.25, 0.25;
  b << 0.0, 0.5, 0.0, 0.5;
  const auto mu = DiscreteMeasure::from_weights(a);
  const auto nu = DiscreteMeasure::from_weights(b);
  const auto res = ot::exact_w2(mu, nu, sm);
  CHECK(res.cost == doctest::Approx(oracles::quantile_w2_1d(mu, nu, sm)).epsilon(1e-12));
  CHECK(res.plan.marginal_error() < 1e-12);
}

TEST_CASE("exact_w2 matches the quantile oracle on random 1D instances") {
  Rng rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng.index(14));
    Eigen::MatrixXd p(n, 1);
    for (int i = 0; i < n; ++i) p(i, 0) = rng.uniform(-3.0, 3.0);
    const auto sm = build_support(p, 1.0);
    const auto mu = random_measure(n, rng);
    const auto nu = random_measure(n, rng);
    const double exact = ot::exact_w2(mu, nu, sm).cost;
    const double oracle = oracles::quantile_w2_1d(mu, nu, sm);
    CHECK(exact == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("exact_w2 with sparse random weights agrees with the oracle") {
  Rng rng(1234);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 10;
    Eigen::MatrixXd p(n, 1);
    for (int i = 0; i < n; ++i) p(i, 0) = rng.uniform(0.0, 1.0);
    const auto sm = build_support(p, 1.0);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.5) a[i] = rng.uniform();
      if (rng.uniform() < 0.5) b[i] = rng.uniform();
    }
    if (a.sum() == 0.0) a[0] = 1.0;
    if (b.sum() == 0.0) b[n - 1] = 1.0;
    const auto mu = DiscreteMeasure::from_weights(a / a.sum());
    const auto nu = DiscreteMeasure::from_weights(b / b.sum());
    const double exact = ot::exact_w2(mu, nu, sm).cost;
    CHECK(exact == doctest::Approx(oracles::quantile_w2_1d(mu, nu, sm)).epsilon(1e-8));
  }
}

TEST_CASE("exact_w2 symmetry and triangle inequality on random small instances") {
  Rng rng(333);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + static_cast<int>(rng.index(14));
    Eigen::MatrixXd p(n, 2);
    for (int i = 0; i < n; ++i) {
      p(i, 0) = rng.uniform(0.0, 1.0);
      p(i, 1) = rng.uniform(0.0, 1.0);
    }
    const auto sm = build_support(p, 1.0);
    const auto x = random_measure(n, rng);
    const auto y = random_measure(n, rng);
    const auto z = random_measure(n, rng);
    const double dxy = ot::exact_w2(x, y, sm).cost;
    const double dyx = ot::exact_w2(y, x, sm).cost;
    CHECK(dxy == doctest::Approx(dyx).epsilon(1e-10));
    const double dxz = std::sqrt(ot::exact_w2(x, z, sm).cost);
    const double dzy = std::sqrt(ot::exact_w2(z, y, sm).cost);
    CHECK(std::sqrt(dxy) <= dxz + dzy + 1e-8);
  }
}

TEST_CASE("exact_w2 beats random feasible plans") {
  Rng rng(2718);
  const int n = 7;
  Eigen::MatrixXd p(n, 2);
  for (int i = 0; i < n; ++i) {
    p(i, 0) = rng.uniform(0.0, 1.0);
    p(i, 1) = rng.uniform(0.0, 1.0);
  }
  const auto sm = build_support(p, 1.0);
  const auto mu = random_measure(n, rng);
  const auto nu = random_measure(n, rng);
  const double opt = ot::exact_w2(mu, nu, sm).cost;
  // Independent coupling and greedy row-wise fills are feasible competitors.
  const Eigen::MatrixXd indep = mu.weights * nu.weights.transpose();
  CHECK(opt <= indep.cwiseProduct(sm.cost).sum() + 1e-12);
}

TEST_CASE("exact_w2 guards oversized supports") {
  Eigen::MatrixXd p(1, 1);
  p << 0.0;
  const auto sm = build_support(p, 1.0);
  SupportModel big = sm;
  big.points = Eigen::MatrixXd::Zero(5000, 1);  // size check fires before any work
  big.cost = Eigen::MatrixXd();
  const auto mu = DiscreteMeasure::dirac(5000, 0);
  CHECK_THROWS_AS(ot::exact_w2(mu, mu, big), InvalidInput);
}

TEST_CASE("ibp barycenter of a single atom is its double smoothing at one iteration") {
  const double eps = 0.05;
  const auto sm = grid_1d(6, eps);
  Rng rng(8);
  const auto atom = random_measure(6, rng);
  const auto res = ot::ibp_barycenter({atom}, Eigen::VectorXd::Ones(1), sm, 1);

  // By hand: u = atom / K 1, b = K^T u, renormalized.
  const Eigen::VectorXd ku = sm.kernel * Eigen::VectorXd::Ones(6);
  const Eigen::VectorXd u = atom.weights.cwiseQuotient(ku);
  Eigen::VectorXd b = sm.kernel.transpose() * u;
  b /= b.sum();
  for (int i = 0; i < 6; ++i) {
    CHECK(res.barycenter.weights[i] == doctest::Approx(b[i]).epsilon(1e-9));
  }
}

TEST_CASE("ibp barycenter single atom converges to the atom as epsilon shrinks") {
  Rng rng(21);
  Eigen::VectorXd w(5);
  w << 0.3, 0.1, 0.2, 0.25, 0.15;
  const auto atom = DiscreteMeasure::from_weights(w);
  double prev = 1e9;
  for (double eps : {0.05, 0.01, 0.004}) {
    const auto sm = grid_1d(5, eps);
    const auto res = ot::ibp_barycenter({atom}, Eigen::VectorXd::Ones(1), sm, 300);
    const double err = (res.barycenter.weights - atom.weights).cwiseAbs().sum();
    CHECK(err < prev + 1e-12);
    prev = err;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("ibp one-hot weights reduce to the single-atom case") {
  const auto sm = grid_1d(6, 0.03);
  Rng rng(4);
  const auto a0 = random_measure(6, rng);
  const auto a1 = random_measure(6, rng);
  Eigen::VectorXd onehot(2);
  onehot << 0.0, 1.0;
  const auto picked = ot::ibp_barycenter({a0, a1}, onehot, sm, 40);
  const auto alone = ot::ibp_barycenter({a1}, Eigen::VectorXd::Ones(1), sm, 40);
  for (int i = 0; i < 6; ++i) {
    CHECK(picked.barycenter.weights[i] ==
          doctest::Approx(alone.barycenter.weights[i]).epsilon(1e-9));
  }
}

TEST_CASE("ibp midpoint of two diracs concentrates at the center") {
  const auto sm = build_support(points_1d({0.0, 0.5, 1.0}), 0.005);
  const auto d0 = DiscreteMeasure::dirac(3, 0);
  const auto d1 = DiscreteMeasure::dirac(3, 2);

  // Exhaustive check of the fixed-support objective over a fine simplex grid:
  // the optimum of 0.5 W2(d0, b) + 0.5 W2(d1, b) is the middle dirac at 0.25.
  double best_obj = 1e18;
  Eigen::VectorXd best(3);
  const int steps = 60;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j + i <= steps; ++j) {
      Eigen::VectorXd w(3);
      w << static_cast<double>(i) / steps, static_cast<double>(j) / steps,
          static_cast<double>(steps - i - j) / steps;
      if (w.sum() <= 0.0) continue;
      const auto cand = DiscreteMeasure::from_weights(w);
      const double obj = 0.5 * ot::exact_w2(d0, cand, sm).cost +
                         0.5 * ot::exact_w2(d1, cand, sm).cost;
      if (obj < best_obj) {
        best_obj = obj;
        best = w;
      }
    }
  }
  CHECK(best_obj == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(best[1] == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd lam(2);
  lam << 0.5, 0.5;
  const auto res = ot::ibp_barycenter({d0, d1}, lam, sm, 500);
  CHECK(res.barycenter.weights[1] > 0.98);
  CHECK(res.diagnostics.floored_logs > 0);  // dirac atoms have zero entries
}

TEST_CASE("ibp output is bitwise invariant under joint permutation") {
  Rng rng(77);
  const auto sm = grid_1d(7, 0.05);
  std::vector<DiscreteMeasure> atoms;
  for (int j = 0; j < 4; ++j) atoms.push_back(random_measure(7, rng));
  Eigen::VectorXd lam = rng.simplex(4);

  const auto base = ot::ibp_barycenter(atoms, lam, sm, 25);
  std::vector<int> perm = {2, 0, 3, 1};
  std::vector<DiscreteMeasure> atoms_p;
  Eigen::VectorXd lam_p(4);
  for (int j = 0; j < 4; ++j) {
    atoms_p.push_back(atoms[perm[j]]);
    lam_p[j] = lam[perm[j]];
  }
  const auto permuted = ot::ibp_barycenter(atoms_p, lam_p, sm, 25);
  for (int i = 0; i < 7; ++i) {
    CHECK(base.barycenter.weights[i] == permuted.barycenter.weights[i]);
  }
}

TEST_CASE("entropic_map identity, forced dirac, and monotone 1D shift") {
  const double eps = 0.004;
  const auto sm = grid_1d(5, eps);
  Rng rng(13);
  const auto mu = random_measure(5, rng);
  const auto id_map = ot::entropic_map(mu, mu, sm, 400);
  for (int i = 0; i < 5; ++i) {
    CHECK(id_map.valid[i]);
    CHECK(std::abs(id_map.images(i, 0) - sm.points(i, 0)) < 0.02);
  }

  const auto fd = ot::entropic_map(DiscreteMeasure::dirac(5, 1), DiscreteMeasure::dirac(5, 3), sm, 50);
  CHECK(fd.valid[1]);
  CHECK_FALSE(fd.valid[0]);
  CHECK(fd.images(1, 0) == doctest::Approx(sm.points(3, 0)).epsilon(1e-12));

  // mu uniform on {0,1}, nu uniform on {2,3}: the monotone map is 0->2, 1->3.
  const auto line = build_support(points_1d({0.0, 1.0, 2.0, 3.0}), 0.02);
  Eigen::VectorXd a(4), b(4);
  a << 0.5, 0.5, 0.0, 0.0;
  b << 0.0, 0.0, 0.5, 0.5;
  const auto est = ot::entropic_map(DiscreteMeasure::from_weights(a),
                                    DiscreteMeasure::from_weights(b), line, 2000);
  CHECK(est.images(0, 0) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(est.images(1, 0) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("mccann endpoints are exact") {
  const auto sm = grid_1d(9, 0.05);
  Rng rng(6);
  const auto mu = random_measure(9, rng);
  const auto nu = random_measure(9, rng);
  const auto at0 = ot::mccann_1d(mu, nu, ot::InterpolationCoord(0.0), sm);
  const auto at1 = ot::mccann_1d(mu, nu, ot::InterpolationCoord(1.0), sm);
  for (int i = 0; i < 9; ++i) {
    CHECK(at0.weights[i] == mu.weights[i]);
    CHECK(at1.weights[i] == nu.weights[i]);
  }
}

TEST_CASE("mccann dirac midpoint lands on the middle grid point") {
  const auto sm = build_support(points_1d({0.0, 0.5, 1.0}), 0.05);
  const auto mid = ot::mccann_1d(DiscreteMeasure::dirac(3, 0), DiscreteMeasure::dirac(3, 2),
                                 ot::InterpolationCoord(0.5), sm);
  CHECK(mid.weights[1] == 1.0);
}

TEST_CASE("mccann splits preserve mass and mean") {
  const auto sm = build_support(points_1d({0.0, 1.0, 3.0}), 0.05);
  // Interpolating diracs at 0 and 3 by t=0.5 gives 1.5, between grid points 1
  // and 3: split keeps the mean at 1.5.
  const auto mid = ot::mccann_1d(DiscreteMeasure::dirac(3, 0), DiscreteMeasure::dirac(3, 2),
                                 ot::InterpolationCoord(0.5), sm);
  CHECK(mid.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  const double mean = mid.weights[0] * 0.0 + mid.weights[1] * 1.0 + mid.weights[2] * 3.0;
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("mccann constant-speed property on a dense grid") {
  const auto sm = grid_1d(64, 0.05);
  Rng rng(41);
  const auto mu = random_measure(64, rng);
  const auto nu = random_measure(64, rng);
  const double full = std::sqrt(ot::exact_w2(mu, nu, sm).cost);
  for (double t : {0.25, 0.5, 0.75}) {
    const auto mt = ot::mccann_1d(mu, nu, ot::InterpolationCoord(t), sm);
    const double part = std::sqrt(ot::exact_w2(mu, mt, sm).cost);
    CHECK(part == doctest::Approx(t * full).epsilon(0.02));
  }
}

TEST_CASE("mccann rejects non-1D supports and unsorted grids") {
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 0.0, 1.0, 1.0;
  const auto plane = build_support(p, 1.0);
  const auto mu = DiscreteMeasure::dirac(2, 0);
  CHECK_THROWS_AS(ot::mccann_1d(mu, mu, ot::InterpolationCoord(0.5), plane), InvalidInput);

  const auto unsorted = build_support(points_1d({1.0, 0.0}), 1.0);
  CHECK_THROWS_AS(ot::mccann_1d(mu, mu, ot::InterpolationCoord(0.5), unsorted), InvalidInput);
  CHECK_THROWS_AS(ot::InterpolationCoord(1.5), InvalidInput);
}

TEST_CASE("geodesic extension inequality on the hand-computable dirac triple") {
  const auto sm = build_support(points_1d({0.0, 0.5, 1.0, 2.0}), 0.05);
  const auto mu = DiscreteMeasure::dirac(4, 0);
  const auto nu = DiscreteMeasure::dirac(4, 2);
  const auto nt = DiscreteMeasure::dirac(4, 3);
  const auto check =
      ot::verify_geodesic_extension(mu, nu, nt, {ot::InterpolationCoord(0.5)}, sm);
  CHECK(check.sides[0].first == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(check.s_values[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(check.sides[0].second == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("geodesic extension with nu_tilde equal to nu is an equality") {
  Rng rng(55);
  const auto inst = bench::random_extension_instance_1d(rng, 4, 0.5, {0.3, 0.7}, 0.2, 1.0);
  const auto nu = inst.interpolate(0.5);
  const auto check = ot::verify_geodesic_extension(
      inst.measure_a, nu, nu, {ot::InterpolationCoord(0.3), ot::InterpolationCoord(0.7)},
      inst.support);
  for (const auto& [lhs, rhs] : check.sides) {
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("geodesic extension detects a violated precondition") {
  const auto sm = build_support(points_1d({0.0, 1.0, 2.0}), 0.05);
  const auto mu = DiscreteMeasure::dirac(3, 0);
  const auto off = DiscreteMeasure::dirac(3, 2);   // not between mu and nu_tilde
  const auto nt = DiscreteMeasure::dirac(3, 1);
  CHECK_THROWS_AS(
      ot::verify_geodesic_extension(mu, off, nt, {ot::InterpolationCoord(0.5)}, sm),
      InvalidInput);
}

TEST_CASE("geodesic extension inequality holds on randomized instances") {
  Rng rng(4242);
  for (int rep = 0; rep < 25; ++rep) {
    const double r = rng.uniform(0.25, 0.75);
    std::vector<double> ts = {rng.uniform(0.1, 0.45), rng.uniform(0.55, 0.9)};
    const auto inst = bench::random_extension_instance_1d(rng, 3, r, ts, 0.15, 1.0);
    const auto nu = inst.interpolate(r);
    const auto check = ot::verify_geodesic_extension(
        inst.measure_a, nu, inst.measure_b,
        {ot::InterpolationCoord(ts[0]), ot::InterpolationCoord(ts[1])}, inst.support);
    for (const auto& [lhs, rhs] : check.sides) {
      CHECK(lhs <= rhs + 1e-6 * std::max(1.0, std::abs(rhs)));
    }
  }
}
