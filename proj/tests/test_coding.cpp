#include <cmath>

#include <doctest.h>

#include "geosw/datasets.hpp"
#include "geosw/coding.hpp"
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

coding::CodingProblem direct_problem(const Eigen::MatrixXd& gram, const Eigen::VectorXd& cost) {
  coding::CodingProblem p;
  p.gram = gram;
  p.cost = cost;
  return p;
}

}  // namespace

TEST_CASE("build_problem: self-map displacement vanishes") {
  const auto sm = build_support(points_1d({0.0, 0.25, 0.5, 0.75, 1.0}), 0.0025);
  Rng rng(3);
  const auto mu = DiscreteMeasure::from_weights(rng.simplex(5));
  const auto other = DiscreteMeasure::from_weights(rng.simplex(5));

  const auto problem = coding::build_problem(mu, {mu, other}, sm, 800);
  CHECK(std::abs(problem.gram(0, 0)) < 1e-3);
  CHECK(std::abs(problem.gram(0, 1)) < 5e-2);
  CHECK(problem.cost[0] < 1e-3);
  CHECK(problem.cost[1] > problem.cost[0]);

  const auto single = coding::build_problem(mu, {mu}, sm, 800);
  CHECK(std::abs(single.gram(0, 0)) < 1e-3);
  CHECK(single.cost[0] < 1e-3);
}

TEST_CASE("build_problem: three-dirac line fixture has the hand-computed gram") {
  const auto sm = build_support(points_1d({0.0, 1.0, 2.0}), 0.01);
  const auto d0 = DiscreteMeasure::dirac(3, 0);
  const auto d2 = DiscreteMeasure::dirac(3, 2);
  const auto mu = DiscreteMeasure::dirac(3, 1);

  const auto problem = coding::build_problem(mu, {d0, d2}, sm, 50);
  // T_1 - id = -1 and T_2 - id = +1 at the single mass point.
  CHECK(problem.gram(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(problem.gram(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(problem.gram(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(problem.cost[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(problem.cost[1] == doctest::Approx(1.0).epsilon(1e-3));

  const auto qp = coding::solve_qp(problem);
  CHECK(qp.lambda[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(qp.lambda[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(qp.objective < 1e-8);
}

TEST_CASE("gram matrices are PSD on random problems") {
  Rng rng(17);
  const auto sm = build_support(points_1d({0.0, 0.2, 0.45, 0.7, 1.0}), 0.002);
  for (int rep = 0; rep < 5; ++rep) {
    const auto mu = DiscreteMeasure::from_weights(rng.simplex(5));
    std::vector<DiscreteMeasure> dict;
    for (int j = 0; j < 3; ++j) dict.push_back(DiscreteMeasure::from_weights(rng.simplex(5)));
    const auto problem = coding::build_problem(mu, dict, sm, 300);
    CHECK((problem.gram - problem.gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int probe = 0; probe < 50; ++probe) {
      const Eigen::VectorXd lam = rng.simplex(3);
      CHECK(lam.dot(problem.gram * lam) >= -1e-10);
    }
  }
}

TEST_CASE("solve_qp: zero gram returns the uniform tie-break") {
  const auto qp = coding::solve_qp(direct_problem(Eigen::MatrixXd::Zero(3, 3),
                                                  Eigen::VectorXd::Zero(3)));
  for (int j = 0; j < 3; ++j) CHECK(qp.lambda[j] == doctest::Approx(1.0 / 3));
  CHECK(qp.objective == 0.0);
}

TEST_CASE("solve_qp: exact atom match recovers the vertex") {
  const auto sm = build_support(points_1d({0.0, 0.3, 0.65, 1.0}), 0.002);
  Rng rng(23);
  std::vector<DiscreteMeasure> dict;
  for (int j = 0; j < 2; ++j) dict.push_back(DiscreteMeasure::from_weights(rng.simplex(4)));
  const auto problem = coding::build_problem(dict[1], dict, sm, 600);
  const auto qp = coding::solve_qp(problem);
  CHECK(qp.lambda[1] > 0.95);
  CHECK(qp.objective < 1e-4);
}

TEST_CASE("solve_qp objective is never beaten by random simplex points") {
  Rng rng(29);
  for (int rep = 0; rep < 3; ++rep) {
    // Random PSD gram.
    Eigen::MatrixXd b(4, 4);
    for (int i = 0; i < 16; ++i) b(i / 4, i % 4) = rng.uniform(-1.0, 1.0);
    const auto problem = direct_problem(b * b.transpose(), Eigen::VectorXd::Zero(4));
    const auto qp = coding::solve_qp(problem);
    for (int probe = 0; probe < 1000; ++probe) {
      const Eigen::VectorXd lam = rng.simplex(4);
      CHECK(qp.objective <= lam.dot(problem.gram * lam) + 1e-9);
    }
  }
}

TEST_CASE("solve_qp rejects an indefinite gram") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(coding::solve_qp(direct_problem(bad, Eigen::VectorXd::Zero(2))), InvalidInput);
}

TEST_CASE("two-atom recovery: quantile-average barycenters code back to their weights") {
  Rng rng(31);
  // Quantile-aligned chunks; mu is the exact barycenter at lambda*.
  for (double lam_star : {0.25, 0.5, 0.75}) {
    const auto inst = bench::make_chunk_instance_1d(
        {0.0, 0.14, 0.3}, {0.62, 0.8, 1.0}, {0.3, 0.45, 0.25}, {lam_star}, 0.0015);
    const auto mu = inst.interpolate(lam_star);
    const auto problem =
        coding::build_problem(mu, {inst.measure_a, inst.measure_b}, inst.support, 1200);
    const auto qp = coding::solve_qp(problem);
    CHECK(std::abs(qp.lambda[0] - (1.0 - lam_star)) < 0.02);
    CHECK(std::abs(qp.lambda[1] - lam_star) < 0.02);
    CHECK(qp.objective < 1e-4);
  }
}

TEST_CASE("solve_lp: single atom and degenerate dictionary tie-breaks") {
  const auto one = coding::solve_lp(direct_problem(Eigen::MatrixXd::Zero(1, 1),
                                                   Eigen::VectorXd::Zero(1)), 0.0);
  CHECK(one.lambda[0] == 1.0);
  CHECK(one.feasible);

  // Two identical atoms reconstructing mu exactly: any lambda feasible,
  // uniform returned.
  const auto tie = coding::solve_lp(direct_problem(Eigen::MatrixXd::Zero(2, 2),
                                                   Eigen::VectorXd::Zero(2)), 1e-9);
  CHECK(tie.lambda[0] == doctest::Approx(0.5));
  CHECK(tie.feasible);
}

TEST_CASE("solve_lp avoids expensive atoms among feasible reconstructions") {
  // Displacements d = (-1, 1, 2) so the null space on the simplex is the
  // segment lambda3 <= 1/3 with lambda1 = (1+lambda3*... ; costs prefer
  // lambda3 = 0, i.e. (0.5, 0.5, 0).
  Eigen::VectorXd d(3);
  d << -1.0, 1.0, 2.0;
  const Eigen::MatrixXd gram = d * d.transpose();
  Eigen::VectorXd cost(3);
  cost << 1.0, 1.0, 4.0;
  const auto problem = direct_problem(gram, cost);

  const auto qp = coding::solve_qp(problem);
  const double tau = 1e-4;
  const auto lp = coding::solve_lp(problem, tau);
  CHECK(lp.feasible);
  CHECK(lp.lambda[2] < 0.05);
  CHECK(lp.lambda[0] == doctest::Approx(0.5).epsilon(0.05));
  // Cheapest point of the relaxed feasible set: grid-check that no feasible
  // simplex point does better.
  for (double l3 : {0.0, 0.1, 0.2, 0.3}) {
    for (double l1 = 0.0; l1 <= 1.0 - l3 + 1e-12; l1 += 0.05) {
      Eigen::VectorXd cand(3);
      cand << l1, 1.0 - l3 - l1, l3;
      if (cand.dot(gram * cand) <= tau) {
        CHECK(lp.objective <= problem.cost.dot(cand) + 1e-6);
      }
    }
  }
  CHECK(lp.objective <= problem.cost.dot(qp.lambda) + 1e-9);
  CHECK(lp.objective >= problem.cost.minCoeff() - 1e-12);
  CHECK(lp.quadratic_value <= tau);

  // The default relaxation level stays usable even when the quadratic
  // minimum is numerically zero: the result is feasible and no worse than
  // the quadratic minimizer.
  const auto lp_default = coding::solve_lp(problem, coding::default_tau(problem));
  CHECK(lp_default.feasible);
  CHECK(lp_default.quadratic_value <= coding::default_tau(problem));
  CHECK(lp_default.objective <= problem.cost.dot(qp.lambda) + 1e-9);
}

TEST_CASE("solve_lp flags infeasible relaxation levels") {
  Eigen::MatrixXd gram(2, 2);
  gram << 1.0, 0.0, 0.0, 1.0;  // lambda'A lambda >= 0.5 on the simplex
  Eigen::VectorXd cost(2);
  cost << 1.0, 2.0;
  const auto lp = coding::solve_lp(direct_problem(gram, cost), 1e-6);
  CHECK_FALSE(lp.feasible);
  CHECK(lp.quadratic_value == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("coding problem JSON round trip") {
  Eigen::MatrixXd gram(2, 2);
  gram << 0.5, -0.25, -0.25, 1.5;
  Eigen::VectorXd cost(2);
  cost << 0.125, 2.25;
  auto problem = direct_problem(gram, cost);
  problem.cost_shift = 0.0625;
  const auto back = coding::problem_from_json(coding::problem_to_json(problem));
  CHECK((back.gram - problem.gram).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.cost - problem.cost).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.cost_shift == problem.cost_shift);
}
