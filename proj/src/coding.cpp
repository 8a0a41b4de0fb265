#include "geosw/coding.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace geosw::coding {

CodingProblem build_problem(const DiscreteMeasure& mu,
                            const std::vector<DiscreteMeasure>& dictionary,
                            const SupportModel& support, int iters,
                            ot::CostEstimator estimator) {
  const int m = static_cast<int>(dictionary.size());
  if (m < 1) throw InvalidInput("build_problem: empty dictionary");
  const int n = support.size();
  if (mu.size() != n) throw InvalidInput("build_problem: measure/support mismatch");

  CodingProblem problem;

  // Displacement fields of the entropic map estimates, rows pre-scaled by
  // sqrt(mu_i) so the Gram entries are plain inner products.
  std::vector<Eigen::MatrixXd> scaled_disp(m);
  for (int j = 0; j < m; ++j) {
    const auto est = ot::entropic_map(mu, dictionary[j], support, iters);
    problem.diagnostics.merge(est.diagnostics);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, support.dim());
    for (int i = 0; i < n; ++i) {
      if (est.valid[i]) {
        d.row(i) = std::sqrt(mu.weights[i]) * (est.images.row(i) - support.points.row(i));
      }
    }
    scaled_disp[j] = std::move(d);
  }

  Eigen::MatrixXd gram(m, m);
  for (int j = 0; j < m; ++j) {
    for (int l = j; l < m; ++l) {
      const double a = scaled_disp[j].cwiseProduct(scaled_disp[l]).sum();
      gram(j, l) = a;
      gram(l, j) = a;
    }
  }
  problem.gram = 0.5 * (gram + gram.transpose());

  problem.cost.resize(m);
  for (int j = 0; j < m; ++j) {
    problem.cost[j] = ot::sinkhorn(dictionary[j], mu, support, iters, estimator).cost;
  }
  const double lowest = problem.cost.minCoeff();
  if (lowest < 0.0) {
    problem.cost.array() -= lowest;
    problem.cost_shift = -lowest;
    problem.diagnostics.cost_shift = -lowest;
  }
  return problem;
}

namespace {

int lowest_argmin(const Eigen::VectorXd& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k) {
    if (v[k] < v[best]) best = k;
  }
  return best;
}

// Frank-Wolfe on f(lambda) = lambda'c + w lambda'A lambda over the simplex,
// exact line search, uniform start. solve_qp is the c = 0, w = 1 case.
Eigen::VectorXd frank_wolfe(const Eigen::MatrixXd& A, const Eigen::VectorXd& c, double w,
                            int max_iters, double gap_tol, int* iters_out, double* gap_out) {
  const int m = static_cast<int>(A.rows());
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(m, 1.0 / m);
  double gap = 0.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    const Eigen::VectorXd grad = c + 2.0 * w * (A * lambda);
    const int k = lowest_argmin(grad);
    gap = grad.dot(lambda) - grad[k];
    if (gap < gap_tol) break;
    Eigen::VectorXd d = -lambda;
    d[k] += 1.0;
    const double slope = grad.dot(d);
    const double curv = w * d.dot(A * d);
    double gamma;
    if (curv > 0.0) {
      gamma = std::clamp(-slope / (2.0 * curv), 0.0, 1.0);
    } else {
      gamma = slope < 0.0 ? 1.0 : 0.0;
    }
    if (gamma == 0.0) break;
    lambda += gamma * d;
  }
  if (iters_out) *iters_out = it;
  if (gap_out) *gap_out = gap;
  return lambda;
}

}  // namespace

QpSolution solve_qp(const CodingProblem& problem) {
  const int m = problem.atoms();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(problem.gram, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8) {
    throw InvalidInput("solve_qp: gram matrix is not PSD within tolerance (min eigenvalue " +
                       std::to_string(eig.eigenvalues().minCoeff()) + ")");
  }
  QpSolution sol;
  sol.lambda = frank_wolfe(problem.gram, Eigen::VectorXd::Zero(m), 1.0, 500, 1e-10,
                           &sol.iterations, &sol.gap);
  sol.objective = sol.lambda.dot(problem.gram * sol.lambda);
  return sol;
}

double default_tau(const CodingProblem& problem) {
  return 10.0 * (solve_qp(problem).objective + 1e-12);
}

LpSolution solve_lp(const CodingProblem& problem, double tau) {
  if (tau < 0.0) throw InvalidInput("solve_lp: tau must be nonnegative");
  const int m = problem.atoms();
  const auto quad = [&](const Eigen::VectorXd& x) { return x.dot(problem.gram * x); };

  const QpSolution qp = solve_qp(problem);
  if (qp.objective > tau) {
    return {qp.lambda, problem.cost.dot(qp.lambda), false, qp.objective};
  }

  // Constant objective: nothing to trade, keep the uniform tie-break.
  if (problem.cost.maxCoeff() == problem.cost.minCoeff()) {
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(m, 1.0 / m);
    if (quad(uniform) <= tau) {
      return {uniform, problem.cost.dot(uniform), true, quad(uniform)};
    }
  }

  // The unconstrained simplex minimum of a linear objective is a vertex; if
  // it satisfies the constraint it is optimal outright.
  Eigen::VectorXd vertex = Eigen::VectorXd::Zero(m);
  vertex[lowest_argmin(problem.cost)] = 1.0;
  if (quad(vertex) <= tau) {
    return {vertex, problem.cost.dot(vertex), true, quad(vertex)};
  }

  LpSolution best{qp.lambda, problem.cost.dot(qp.lambda), true, qp.objective};
  const auto consider = [&](const Eigen::VectorXd& cand) {
    const double q = quad(cand);
    if (q <= tau && problem.cost.dot(cand) < best.objective) {
      best = {cand, problem.cost.dot(cand), true, q};
    }
    return q;
  };

  // Penalty sweep: grow w until feasible, then bisect toward the smallest
  // penalty whose solution stays feasible (constraint active within 10%).
  double w_lo = 0.0, w_hi = 1.0;
  Eigen::VectorXd cand = frank_wolfe(problem.gram, problem.cost, w_hi, 500, 1e-10, nullptr, nullptr);
  double q_hi = consider(cand);
  int doublings = 0;
  while (q_hi > tau && doublings < 60) {
    w_hi *= 4.0;
    cand = frank_wolfe(problem.gram, problem.cost, w_hi, 500, 1e-10, nullptr, nullptr);
    q_hi = consider(cand);
    ++doublings;
  }
  if (q_hi <= tau) {
    for (int step = 0; step < 40 && q_hi < 0.9 * tau; ++step) {
      const double w_mid = w_lo > 0.0 ? std::sqrt(w_lo * w_hi) : w_hi / 4.0;
      if (w_mid <= 0.0 || w_mid >= w_hi) break;
      cand = frank_wolfe(problem.gram, problem.cost, w_mid, 500, 1e-10, nullptr, nullptr);
      const double q_mid = consider(cand);
      if (q_mid <= tau) {
        w_hi = w_mid;
        q_hi = q_mid;
      } else {
        w_lo = w_mid;
      }
    }
  }
  return best;
}

std::string problem_to_json(const CodingProblem& problem) {
  nlohmann::json j;
  j["gram"] = std::vector<std::vector<double>>();
  for (int r = 0; r < problem.gram.rows(); ++r) {
    std::vector<double> row(problem.gram.cols());
    for (int c = 0; c < problem.gram.cols(); ++c) row[c] = problem.gram(r, c);
    j["gram"].push_back(row);
  }
  j["cost"] = std::vector<double>(problem.cost.data(), problem.cost.data() + problem.cost.size());
  j["cost_shift"] = problem.cost_shift;
  return j.dump(2);
}

CodingProblem problem_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CodingProblem problem;
  const auto& gram = j.at("gram");
  const int m = static_cast<int>(gram.size());
  problem.gram.resize(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) problem.gram(r, c) = gram.at(r).at(c).get<double>();
  }
  problem.cost.resize(m);
  for (int k = 0; k < m; ++k) problem.cost[k] = j.at("cost").at(k).get<double>();
  problem.cost_shift = j.value("cost_shift", 0.0);
  return problem;
}

}  // namespace geosw::coding
