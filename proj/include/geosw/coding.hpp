#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "geosw/ot.hpp"
#include "geosw/types.hpp"

namespace geosw::coding {

/// Gram matrix of transport-map displacements and atom-to-target costs of a
/// fixed-dictionary coding problem. lambda' * gram * lambda vanishes exactly
/// when the target is the barycenter of the dictionary at lambda.
struct CodingProblem {
  Eigen::MatrixXd gram;     // m x m, symmetrized, PSD up to roundoff
  Eigen::VectorXd cost;     // c_j = W2e(D_j, mu), nonnegative after shift
  double cost_shift = 0.0;  // amount added to every cost entry
  Diagnostics diagnostics;

  int atoms() const { return static_cast<int>(gram.rows()); }
};

/// Assembles the problem from entropic transport-map estimates:
/// gram_jl = sum_i mu_i <T_j(x_i) - x_i, T_l(x_i) - x_i> over points with
/// mu_i > 0, symmetrized as (A + A')/2.
CodingProblem build_problem(const DiscreteMeasure& mu,
                            const std::vector<DiscreteMeasure>& dictionary,
                            const SupportModel& support, int iters,
                            ot::CostEstimator estimator = ot::CostEstimator::PlanCost);

struct QpSolution {
  Eigen::VectorXd lambda;
  double objective = 0.0;  // lambda' * gram * lambda
  int iterations = 0;
  double gap = 0.0;  // Frank-Wolfe duality gap at exit
};

/// Minimizes lambda' * gram * lambda over the simplex by Frank-Wolfe with
/// exact line search: 500 iterations or duality gap below 1e-10, whichever
/// first. Starts at the uniform vector; vertex ties break to the lowest
/// index. Requires the gram matrix PSD within eigenvalue tolerance -1e-8.
QpSolution solve_qp(const CodingProblem& problem);

struct LpSolution {
  Eigen::VectorXd lambda;
  double objective = 0.0;        // lambda' * cost
  bool feasible = true;          // false when even the QP minimum exceeds tau
  double quadratic_value = 0.0;  // lambda' * gram * lambda at the solution
};

/// Minimizes lambda' * cost over {lambda on the simplex : lambda' * gram *
/// lambda <= tau} by a penalized Frank-Wolfe sweep that stops once the
/// constraint is active within 10% (or provably inactive). When tau is
/// unreachable the QP minimizer is returned with feasible = false.
LpSolution solve_lp(const CodingProblem& problem, double tau);

/// Default relaxation level: 10 x (QP minimum + 1e-12).
double default_tau(const CodingProblem& problem);

std::string problem_to_json(const CodingProblem& problem);
CodingProblem problem_from_json(const std::string& text);

}  // namespace geosw::coding
