#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "geosw/autodiff.hpp"
#include "geosw/rng.hpp"
#include "geosw/types.hpp"

namespace geosw::wdl {

enum class AtomInit { RandomSimplex, RandomData, WassersteinKmeanspp };
enum class WeightInit { UniformSimplex, HistogramRegression, QuadraticProgram };

struct FitConfig {
  double rho = 0.0;         // regularizer balance
  int outer_iters = 100;    // optimizer iterations
  int sinkhorn_iters = 25;  // unrolled scaling steps per distance/barycenter
  double learning_rate = 0.25;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  AtomInit atom_init = AtomInit::WassersteinKmeanspp;
  WeightInit weight_init = WeightInit::UniformSimplex;
  SimplexSampler simplex_sampler = SimplexSampler::ExponentialGaps;

  void validate() const;
};

struct FitResult {
  std::vector<DiscreteMeasure> dictionary;
  CoefficientMatrix coefficients;
  std::vector<double> loss_trace;  // one entry per outer iteration
  Diagnostics diagnostics;
};

/// Numerical breakdown during fit; carries the completed part of the trace.
class FitError : public NumericalError {
public:
  FitError(const std::string& what, std::vector<double> partial_trace)
      : NumericalError(what), partial_trace(std::move(partial_trace)) {}
  std::vector<double> partial_trace;
};

/// First/second-moment accumulators for one parameter matrix.
struct AdamState {
  Eigen::MatrixXd m, v;
  long step = 0;

  static AdamState like(const Eigen::MatrixXd& params) {
    return {Eigen::MatrixXd::Zero(params.rows(), params.cols()),
            Eigen::MatrixXd::Zero(params.rows(), params.cols()), 0};
  }
};

/// One bias-corrected Adam update, in place.
void adam_step(Eigen::MatrixXd& params, AdamState& state, const Eigen::MatrixXd& grad, double lr,
               double beta1, double beta2, double eps_adam);

/// sum_i sum_j Lambda_ij * W2e(D_j, mu_i) evaluated with `iters` scaling
/// steps per distance.
double regularizer(const std::vector<DiscreteMeasure>& dictionary,
                   const CoefficientMatrix& coefficients,
                   const std::vector<DiscreteMeasure>& data, const SupportModel& support,
                   int iters);

/// Entropic transport costs between every atom and every data point,
/// cost(i, j) = W2e(D_j, mu_i).
Eigen::MatrixXd atom_cost_matrix(const std::vector<DiscreteMeasure>& dictionary,
                                 const std::vector<DiscreteMeasure>& data,
                                 const SupportModel& support, int iters);

/// Logits whose softmax reproduces `w` exactly: log of weights floored at
/// 1e-12 (softmax shift invariance absorbs the normalization).
Eigen::VectorXd logits_from_weights(const Eigen::VectorXd& w);

struct AtomInitResult {
  std::vector<DiscreteMeasure> atoms;
  Eigen::MatrixXd beta0;  // m x N
};

/// Atom initialization. Data-based methods need at least m data points;
/// the k-means++ method samples proportionally to the entropic cost to the
/// closest already-chosen atom, shifted to be nonnegative if the estimator
/// went negative.
AtomInitResult init_atoms(const std::vector<DiscreteMeasure>& data, int m,
                          const SupportModel& support, AtomInit method, Rng& rng,
                          int sinkhorn_iters,
                          SimplexSampler sampler = SimplexSampler::ExponentialGaps);

struct WeightInitResult {
  CoefficientMatrix coefficients;
  Eigen::MatrixXd alpha0;  // n x m
};

WeightInitResult init_weights(const std::vector<DiscreteMeasure>& data,
                              const std::vector<DiscreteMeasure>& dictionary,
                              const SupportModel& support, WeightInit method, Rng& rng,
                              int sinkhorn_iters,
                              SimplexSampler sampler = SimplexSampler::ExponentialGaps);

/// Full training loop: initialize logits, then exactly outer_iters rounds of
/// {loss + gradients, Adam update}. The returned dictionary/coefficients are
/// the ones whose loss is the last trace entry. Reproducible from the seed.
FitResult fit(const std::vector<DiscreteMeasure>& data, int m, const SupportModel& support,
              const FitConfig& config);

/// Restarted fit with derived seeds. Runs whose final loss is within 5% of
/// the best are ranked by min_j max_i lambda_ij (every atom should be used
/// by someone); ties go to the lowest final loss.
FitResult fit_best_of(const std::vector<DiscreteMeasure>& data, int m,
                      const SupportModel& support, const FitConfig& config, int restarts);

}  // namespace geosw::wdl
