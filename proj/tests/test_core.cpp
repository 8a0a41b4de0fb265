#include <cmath>

#include <doctest.h>

#include "geosw/rng.hpp"
#include "geosw/types.hpp"
#include "support/oracles.hpp"

using namespace geosw;

namespace {

Eigen::MatrixXd points_1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd p(xs.size(), 1);
  int i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

}  // namespace

TEST_CASE("build_support on {0,1} with unit epsilon") {
  const auto sm = build_support(points_1d({0.0, 1.0}), 1.0);
  CHECK(sm.cost(0, 0) == 0.0);
  CHECK(sm.cost(0, 1) == 1.0);
  CHECK(sm.cost(1, 0) == 1.0);
  CHECK(sm.kernel(0, 0) == 1.0);
  CHECK(sm.kernel(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("build_support singleton") {
  const auto sm = build_support(points_1d({3.5}), 0.7);
  CHECK(sm.size() == 1);
  CHECK(sm.cost(0, 0) == 0.0);
  CHECK(sm.kernel(0, 0) == 1.0);
}

TEST_CASE("build_support 3-4-5 triangle in the plane") {
  Eigen::MatrixXd p(2, 2);
  p << 0.0, 0.0, 3.0, 4.0;
  const auto sm = build_support(p, 25.0);
  CHECK(sm.cost(0, 1) == 25.0);
  CHECK(sm.kernel(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("build_support symmetry and zero diagonal over random points") {
  Rng rng(7);
  Eigen::MatrixXd p(9, 3);
  for (int i = 0; i < p.size(); ++i) p(i / 3, i % 3) = rng.uniform(-2.0, 2.0);
  const auto sm = build_support(p, 0.5);
  for (int i = 0; i < sm.size(); ++i) {
    CHECK(sm.cost(i, i) == 0.0);
    for (int j = 0; j < sm.size(); ++j) {
      CHECK(sm.cost(i, j) == sm.cost(j, i));
      CHECK(sm.kernel(i, j) > 0.0);
      CHECK(sm.kernel(i, j) <= 1.0);
    }
  }
}

TEST_CASE("build_support rejects bad inputs") {
  CHECK_THROWS_AS(build_support(points_1d({0.0, 1.0}), 0.0), InvalidInput);
  CHECK_THROWS_AS(build_support(points_1d({0.0, 1.0}), -1.0), InvalidInput);
  CHECK_THROWS_AS(build_support(Eigen::MatrixXd(0, 1), 1.0), InvalidInput);
  // kernel underflow for the farthest pair
  CHECK_THROWS_AS(build_support(points_1d({0.0, 100.0}), 1e-2), NumericalError);
}

TEST_CASE("default_epsilon rule") {
  CHECK(default_epsilon(points_1d({0.0, 1.0})) == doctest::Approx(0.002));
  CHECK(default_epsilon(points_1d({2.0})) == 1.0);  // degenerate support
}

TEST_CASE("softmax of a zero row is uniform") {
  const Eigen::VectorXd out = softmax_row(Eigen::VectorXd::Zero(3));
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("softmax matches exponential ratios") {
  Eigen::VectorXd logits(2);
  logits << 0.0, std::log(2.0);
  const Eigen::VectorXd out = softmax_row(logits);
  CHECK(out[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(2.0 / 3).epsilon(1e-14));
}

TEST_CASE("softmax survives huge logits and matches extended precision") {
  Eigen::VectorXd logits(3);
  logits << 1000.0, 1000.0, 0.0;
  const Eigen::VectorXd out = softmax_row(logits);
  const Eigen::VectorXd ref = oracles::softmax_long_double(logits);
  CHECK(out.allFinite());
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("softmax shift invariance") {
  Rng rng(3);
  Eigen::VectorXd logits(5);
  for (int i = 0; i < 5; ++i) logits[i] = rng.uniform(-4.0, 4.0);
  const Eigen::VectorXd base = softmax_row(logits);
  const Eigen::VectorXd shifted = softmax_row(logits.array() + 123.25);
  for (int i = 0; i < 5; ++i) CHECK(base[i] == doctest::Approx(shifted[i]).epsilon(1e-13));
}

TEST_CASE("softmax rejects NaN") {
  Eigen::VectorXd logits(2);
  logits << 0.0, std::nan("");
  CHECK_THROWS_AS(softmax_row(logits), InvalidInput);
}

TEST_CASE("softmax rows land on the simplex for wild logit matrices") {
  Rng rng(11);
  Eigen::MatrixXd logits(40, 6);
  for (int i = 0; i < logits.rows(); ++i) {
    for (int j = 0; j < logits.cols(); ++j) logits(i, j) = rng.uniform(-800.0, 800.0);
  }
  const Eigen::MatrixXd rows = softmax_rows(logits);
  const auto cm = CoefficientMatrix::from_rows(rows);  // validates every row
  CHECK(cm.n() == 40);
  for (int i = 0; i < rows.rows(); ++i) {
    CHECK(DiscreteMeasure::from_weights(rows.row(i).transpose()).size() == 6);
  }
}

TEST_CASE("measure validation renormalizes inside tolerance and rejects outside") {
  Eigen::VectorXd w(2);
  w << 0.5, 0.5 + 5e-10;
  const auto mu = DiscreteMeasure::from_weights(w);
  CHECK(mu.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));

  w << 0.5, 0.6;
  CHECK_THROWS_AS(DiscreteMeasure::from_weights(w), InvalidInput);
  w << -0.1, 1.1;
  CHECK_THROWS_AS(DiscreteMeasure::from_weights(w), InvalidInput);
}

TEST_CASE("identical seeds give identical streams, different seeds diverge") {
  Rng a(42), b(42), c(43);
  Eigen::VectorXd sa = a.simplex(4), sb = b.simplex(4);
  for (int i = 0; i < 4; ++i) CHECK(sa[i] == sb[i]);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(Rng(42).next_u64() != c.next_u64());
}

TEST_CASE("derived streams are independent of draw order") {
  Rng d1 = Rng::derive(9, 1);
  Rng d2 = Rng::derive(9, 2);
  const double x1 = d1.uniform();
  CHECK(Rng::derive(9, 2).uniform() == d2.uniform());
  CHECK(Rng::derive(9, 1).uniform() == x1);
}

TEST_CASE("uniform simplex sampler has the right mean") {
  Rng rng(123);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) mean += rng.simplex(3);
  mean /= samples;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - 1.0 / 3) < 0.01);
}

TEST_CASE("both simplex samplers produce valid simplex points") {
  Rng rng(5);
  for (int s = 0; s < 50; ++s) {
    (void)DiscreteMeasure::from_weights(rng.simplex(6, SimplexSampler::ExponentialGaps));
    (void)DiscreteMeasure::from_weights(rng.simplex(6, SimplexSampler::NormalizedUniform));
  }
}

TEST_CASE("one_hot coefficient rows") {
  const auto cm = CoefficientMatrix::one_hot(3, 2, {0, 1, 1});
  CHECK(cm.rows(0, 0) == 1.0);
  CHECK(cm.rows(1, 1) == 1.0);
  CHECK(cm.rows(2, 0) == 0.0);
  CHECK_THROWS_AS(CoefficientMatrix::one_hot(2, 2, {0, 5}), InvalidInput);
}

TEST_CASE("floored_log counts clamped entries") {
  Eigen::VectorXd w(3);
  w << 0.5, 0.0, 0.5;
  long floored = 0;
  const Eigen::VectorXd lw = floored_log(w, &floored);
  CHECK(floored == 1);
  CHECK(lw[1] == doctest::Approx(std::log(1e-300)));
  CHECK(lw.allFinite());
}
