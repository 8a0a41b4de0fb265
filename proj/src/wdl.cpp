#include "geosw/wdl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geosw/coding.hpp"
#include "geosw/ot.hpp"

namespace geosw::wdl {

void FitConfig::validate() const {
  if (outer_iters < 1) throw InvalidInput("FitConfig: outer_iters must be >= 1");
  if (sinkhorn_iters < 1) throw InvalidInput("FitConfig: sinkhorn_iters must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidInput("FitConfig: learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidInput("FitConfig: adam betas must lie in [0, 1)");
  }
  if (rho < 0.0) throw InvalidInput("FitConfig: rho must be nonnegative");
}

void adam_step(Eigen::MatrixXd& params, AdamState& state, const Eigen::MatrixXd& grad, double lr,
               double beta1, double beta2, double eps_adam) {
  ++state.step;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  const Eigen::MatrixXd mhat = state.m / bc1;
  const Eigen::MatrixXd vhat = state.v / bc2;
  params.array() -= lr * mhat.array() / (vhat.array().sqrt() + eps_adam);
}

Eigen::MatrixXd atom_cost_matrix(const std::vector<DiscreteMeasure>& dictionary,
                                 const std::vector<DiscreteMeasure>& data,
                                 const SupportModel& support, int iters) {
  Eigen::MatrixXd costs(data.size(), dictionary.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < dictionary.size(); ++j) {
      costs(static_cast<long>(i), static_cast<long>(j)) =
          ot::sinkhorn(dictionary[j], data[i], support, iters).cost;
    }
  }
  return costs;
}

double regularizer(const std::vector<DiscreteMeasure>& dictionary,
                   const CoefficientMatrix& coefficients,
                   const std::vector<DiscreteMeasure>& data, const SupportModel& support,
                   int iters) {
  if (coefficients.n() != static_cast<int>(data.size()) ||
      coefficients.m() != static_cast<int>(dictionary.size())) {
    throw InvalidInput("regularizer: coefficient shape mismatch");
  }
  const Eigen::MatrixXd costs = atom_cost_matrix(dictionary, data, support, iters);
  return coefficients.rows.cwiseProduct(costs).sum();
}

Eigen::VectorXd logits_from_weights(const Eigen::VectorXd& w) {
  return w.cwiseMax(1e-12).array().log();
}

namespace {

std::vector<int> distinct_indices(int n, int m, Rng& rng) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int k = 0; k < m; ++k) {
    const std::size_t pick = k + rng.index(static_cast<std::size_t>(n - k));
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(m);
  return pool;
}

}  // namespace

AtomInitResult init_atoms(const std::vector<DiscreteMeasure>& data, int m,
                          const SupportModel& support, AtomInit method, Rng& rng,
                          int sinkhorn_iters, SimplexSampler sampler) {
  if (m < 1) throw InvalidInput("init_atoms: m must be positive");
  const int n = static_cast<int>(data.size());
  if (method != AtomInit::RandomSimplex && n < m) {
    throw InvalidInput("init_atoms: data-based initialization needs at least m data points");
  }

  AtomInitResult res;
  if (method == AtomInit::RandomSimplex) {
    for (int j = 0; j < m; ++j) {
      res.atoms.push_back(
          DiscreteMeasure::from_weights(rng.simplex(support.size(), sampler)));
    }
  } else if (method == AtomInit::RandomData) {
    for (int idx : distinct_indices(n, m, rng)) res.atoms.push_back(data[idx]);
  } else {
    // k-means++ seeding: first center uniform, then D^2 sampling with the
    // entropic costs to the closest chosen center.
    std::vector<int> chosen = {static_cast<int>(rng.index(static_cast<std::size_t>(n)))};
    Eigen::VectorXd closest =
        Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(chosen.size()) < m) {
      const int last = chosen.back();
      for (int i = 0; i < n; ++i) {
        const double c = ot::sinkhorn(data[i], data[last], support, sinkhorn_iters).cost;
        closest[i] = std::min(closest[i], c);
      }
      Eigen::VectorXd weights = closest;
      const double lowest = weights.minCoeff();
      if (lowest < 0.0) weights.array() -= lowest;  // dual estimates can go negative
      for (int idx : chosen) weights[idx] = 0.0;
      std::size_t pick;
      if (weights.sum() > 0.0) {
        pick = rng.categorical(weights);
      } else {
        // all remaining points coincide with a chosen one; fall back to a
        // uniform draw among the unchosen
        std::vector<int> unchosen;
        for (int i = 0; i < n; ++i) {
          if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) unchosen.push_back(i);
        }
        pick = static_cast<std::size_t>(unchosen[rng.index(unchosen.size())]);
      }
      chosen.push_back(static_cast<int>(pick));
    }
    for (int idx : chosen) res.atoms.push_back(data[idx]);
  }

  res.beta0.resize(m, support.size());
  for (int j = 0; j < m; ++j) {
    res.beta0.row(j) = logits_from_weights(res.atoms[j].weights).transpose();
  }
  return res;
}

WeightInitResult init_weights(const std::vector<DiscreteMeasure>& data,
                              const std::vector<DiscreteMeasure>& dictionary,
                              const SupportModel& support, WeightInit method, Rng& rng,
                              int sinkhorn_iters, SimplexSampler sampler) {
  if (dictionary.empty()) throw InvalidInput("init_weights: empty dictionary");
  const int n = static_cast<int>(data.size());
  const int m = static_cast<int>(dictionary.size());

  WeightInitResult res;
  res.alpha0.resize(n, m);

  if (method == WeightInit::UniformSimplex) {
    Eigen::MatrixXd rows(n, m);
    for (int i = 0; i < n; ++i) rows.row(i) = rng.simplex(m, sampler).transpose();
    res.coefficients = CoefficientMatrix::from_rows(rows);
    for (int i = 0; i < n; ++i) {
      res.alpha0.row(i) = logits_from_weights(res.coefficients.rows.row(i).transpose());
    }
    return res;
  }

  Eigen::MatrixXd beta_fixed(m, support.size());
  for (int j = 0; j < m; ++j) {
    beta_fixed.row(j) = logits_from_weights(dictionary[j].weights).transpose();
  }

  Eigen::MatrixXd rows(n, m);
  if (method == WeightInit::HistogramRegression) {
    // Per-datum barycentric regression: projected gradient on the softmax
    // parameterization, fixed budget of 50 steps at rate 0.1.
    for (int i = 0; i < n; ++i) {
      LatentParams params;
      params.alpha = Eigen::MatrixXd::Zero(1, m);
      params.beta = beta_fixed;
      for (int step = 0; step < 50; ++step) {
        const auto lg = ad::loss_and_grad(params, {data[i]}, support, 0.0, sinkhorn_iters);
        params.alpha -= 0.1 * lg.grad_alpha;
      }
      res.alpha0.row(i) = params.alpha.row(0);
      rows.row(i) = softmax_row(params.alpha.row(0).transpose()).transpose();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const auto problem = coding::build_problem(data[i], dictionary, support, sinkhorn_iters);
      const auto qp = coding::solve_qp(problem);
      rows.row(i) = qp.lambda.transpose();
      res.alpha0.row(i) = logits_from_weights(qp.lambda).transpose();
    }
  }
  res.coefficients = CoefficientMatrix::from_rows(rows);
  return res;
}

FitResult fit(const std::vector<DiscreteMeasure>& data, int m, const SupportModel& support,
              const FitConfig& config) {
  config.validate();
  if (data.empty()) throw InvalidInput("fit: no data");
  if (m < 1) throw InvalidInput("fit: m must be positive");

  Rng rng(config.seed);
  FitResult res;

  auto atoms0 = init_atoms(data, m, support, config.atom_init, rng, config.sinkhorn_iters,
                           config.simplex_sampler);
  auto weights0 = init_weights(data, atoms0.atoms, support, config.weight_init, rng,
                               config.sinkhorn_iters, config.simplex_sampler);

  LatentParams params;
  params.alpha = weights0.alpha0;
  params.beta = atoms0.beta0;
  AdamState alpha_state = AdamState::like(params.alpha);
  AdamState beta_state = AdamState::like(params.beta);

  Eigen::MatrixXd last_atoms, last_coeffs;
  for (int k = 0; k < config.outer_iters; ++k) {
    ad::LossGrad lg;
    try {
      lg = ad::loss_and_grad(params, data, support, config.rho, config.sinkhorn_iters);
    } catch (const NumericalError& e) {
      throw FitError(std::string(e.what()) + " (fit iteration " + std::to_string(k + 1) + ")",
                     res.loss_trace);
    }
    res.loss_trace.push_back(lg.loss);
    res.diagnostics.floored_logs += lg.diagnostics.floored_logs;
    last_atoms = softmax_rows(params.beta);
    last_coeffs = softmax_rows(params.alpha);

    adam_step(params.alpha, alpha_state, lg.grad_alpha, config.learning_rate, config.adam_beta1,
              config.adam_beta2, config.adam_eps);
    adam_step(params.beta, beta_state, lg.grad_beta, config.learning_rate, config.adam_beta1,
              config.adam_beta2, config.adam_eps);
  }

  for (int j = 0; j < m; ++j) {
    res.dictionary.push_back(DiscreteMeasure::from_weights(last_atoms.row(j).transpose()));
  }
  res.coefficients = CoefficientMatrix::from_rows(last_coeffs);
  return res;
}

FitResult fit_best_of(const std::vector<DiscreteMeasure>& data, int m,
                      const SupportModel& support, const FitConfig& config, int restarts) {
  if (restarts < 1) throw InvalidInput("fit_best_of: restarts must be positive");
  std::vector<FitResult> runs;
  for (int r = 0; r < restarts; ++r) {
    FitConfig cfg = config;
    cfg.seed = restarts == 1 ? config.seed : Rng::derive(config.seed, static_cast<std::uint64_t>(r)).next_u64();
    runs.push_back(fit(data, m, support, cfg));
  }

  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& run : runs) best_loss = std::min(best_loss, run.loss_trace.back());

  // Among runs close to the best loss, prefer the one where the least-used
  // atom still carries the most weight; ties go to the lower loss.
  int best = -1;
  double best_usage = -1.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double final_loss = runs[r].loss_trace.back();
    if (final_loss > 1.05 * best_loss + 1e-300) continue;
    const double usage = runs[r].coefficients.rows.colwise().maxCoeff().minCoeff();
    if (usage > best_usage ||
        (usage == best_usage && best >= 0 && final_loss < runs[best].loss_trace.back())) {
      best_usage = usage;
      best = static_cast<int>(r);
    }
  }
  return runs[best];
}

}  // namespace geosw::wdl
