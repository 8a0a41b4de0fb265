#include "geosw/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geosw::ad {

int Tape::push(Node n) {
  std::vector<Eigen::VectorXd> dummy;
  eval(n, dummy);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

// Forward step shared by recording and replay. When `values` is empty the
// inputs are read from already-recorded nodes (recording mode); otherwise
// from the replay buffer.
void Tape::eval(Node& n, const std::vector<Eigen::VectorXd>& values) const {
  const auto in = [&](int id) -> const Eigen::VectorXd& {
    return values.empty() ? nodes_[id].value : values[id];
  };
  switch (n.op) {
    case Op::Leaf:
      break;
    case Op::Softmax:
      n.value = softmax_row(in(n.a));
      break;
    case Op::LogSoftmax:
      n.value = log_softmax_row(in(n.a));
      break;
    case Op::KernelLse: {
      const auto r = ot::detail::kernel_lse(*support_, in(n.a));
      n.value = r.y;
      n.scaled = r.scaled;
      n.shift = r.shift;
      break;
    }
    case Op::Sub:
      n.value = in(n.a) - in(n.b);
      break;
    case Op::WeightedCombine: {
      std::vector<const Eigen::VectorXd*> phis(n.inputs.size());
      for (std::size_t k = 0; k < n.inputs.size(); ++k) phis[k] = &in(n.inputs[k]);
      n.value = ot::detail::weighted_log_combine(phis, in(n.a));
      break;
    }
    case Op::PlanCost: {
      const Eigen::VectorXd& u = in(n.a);
      const Eigen::VectorXd& v = in(n.b);
      const int sz = support_->size();
      n.row_cc = Eigen::VectorXd::Zero(sz);
      n.col_cc = Eigen::VectorXd::Zero(sz);
      for (int i = 0; i < sz; ++i) {
        if (!(n.coeffs[i] > 0.0)) continue;  // coeffs holds [row_weights; col_weights]
        for (int j = 0; j < sz; ++j) {
          if (!(n.coeffs[sz + j] > 0.0)) continue;
          const double pc =
              std::exp(u[i] + support_->log_kernel(i, j) + v[j]) * support_->cost(i, j);
          n.row_cc[i] += pc;
          n.col_cc[j] += pc;
        }
      }
      n.value = Eigen::VectorXd::Constant(1, n.row_cc.sum());
      break;
    }
    case Op::Dot:
      n.value = Eigen::VectorXd::Constant(1, in(n.a).dot(in(n.b)));
      break;
    case Op::Stack: {
      n.value.resize(static_cast<int>(n.inputs.size()));
      for (std::size_t k = 0; k < n.inputs.size(); ++k) n.value[static_cast<int>(k)] = in(n.inputs[k])[0];
      break;
    }
    case Op::Affine: {
      double acc = 0.0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) acc += n.coeffs[k] * in(n.inputs[k])[0];
      n.value = Eigen::VectorXd::Constant(1, acc);
      break;
    }
  }
}

int Tape::leaf(const Eigen::VectorXd& value) {
  Node n;
  n.op = Op::Leaf;
  n.value = value;
  return push(std::move(n));
}

int Tape::softmax(int x) {
  Node n;
  n.op = Op::Softmax;
  n.a = x;
  return push(std::move(n));
}

int Tape::log_softmax(int x) {
  Node n;
  n.op = Op::LogSoftmax;
  n.a = x;
  return push(std::move(n));
}

int Tape::kernel_lse(int x) {
  Node n;
  n.op = Op::KernelLse;
  n.a = x;
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  Node n;
  n.op = Op::Sub;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::weighted_combine(const std::vector<int>& phis, int lambda) {
  Node n;
  n.op = Op::WeightedCombine;
  n.inputs = phis;
  n.a = lambda;
  return push(std::move(n));
}

int Tape::plan_cost(int u, int v, const Eigen::VectorXd& row_weights,
                    const Eigen::VectorXd& col_weights) {
  Node n;
  n.op = Op::PlanCost;
  n.a = u;
  n.b = v;
  n.coeffs.resize(2 * support_->size());
  for (int i = 0; i < support_->size(); ++i) {
    n.coeffs[i] = row_weights[i];
    n.coeffs[support_->size() + i] = col_weights[i];
  }
  return push(std::move(n));
}

int Tape::dot(int a, int b) {
  Node n;
  n.op = Op::Dot;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::stack(const std::vector<int>& scalars) {
  Node n;
  n.op = Op::Stack;
  n.inputs = scalars;
  return push(std::move(n));
}

int Tape::affine(const std::vector<int>& scalars, const std::vector<double>& coeffs) {
  Node n;
  n.op = Op::Affine;
  n.inputs = scalars;
  n.coeffs = coeffs;
  return push(std::move(n));
}

void Tape::backward(int seed) {
  adjoints_.assign(nodes_.size(), Eigen::VectorXd());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    adjoints_[k] = Eigen::VectorXd::Zero(nodes_[k].value.size());
  }
  adjoints_[seed][0] = 1.0;

  for (int id = seed; id >= 0; --id) {
    const Node& n = nodes_[id];
    const Eigen::VectorXd& ybar = adjoints_[id];
    if (ybar.isZero(0.0)) continue;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Softmax: {
        const Eigen::VectorXd& y = n.value;
        const double inner = ybar.dot(y);
        adjoints_[n.a].array() += y.array() * (ybar.array() - inner);
        break;
      }
      case Op::LogSoftmax: {
        const Eigen::VectorXd sm = n.value.array().exp();
        adjoints_[n.a] += ybar - sm * ybar.sum();
        break;
      }
      case Op::KernelLse: {
        ot::detail::KernelLse fwd;
        fwd.y = n.value;
        fwd.scaled = n.scaled;
        fwd.shift = n.shift;
        adjoints_[n.a] +=
            ot::detail::kernel_lse_adjoint(*support_, nodes_[n.a].value, fwd, ybar);
        break;
      }
      case Op::Sub:
        adjoints_[n.a] += ybar;
        adjoints_[n.b] -= ybar;
        break;
      case Op::WeightedCombine: {
        const Eigen::VectorXd& lam = nodes_[n.a].value;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          adjoints_[n.inputs[k]] += lam[static_cast<int>(k)] * ybar;
          adjoints_[n.a][static_cast<int>(k)] += nodes_[n.inputs[k]].value.dot(ybar);
        }
        break;
      }
      case Op::PlanCost:
        adjoints_[n.a] += ybar[0] * n.row_cc;
        adjoints_[n.b] += ybar[0] * n.col_cc;
        break;
      case Op::Dot:
        adjoints_[n.a] += ybar[0] * nodes_[n.b].value;
        adjoints_[n.b] += ybar[0] * nodes_[n.a].value;
        break;
      case Op::Stack:
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          adjoints_[n.inputs[k]][0] += ybar[static_cast<int>(k)];
        }
        break;
      case Op::Affine:
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          adjoints_[n.inputs[k]][0] += n.coeffs[k] * ybar[0];
        }
        break;
    }
  }
}

double Tape::replay(int node) const {
  std::vector<Eigen::VectorXd> values(nodes_.size());
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    Node scratch = nodes_[k];
    if (scratch.op != Op::Leaf) {
      eval(scratch, values);
    }
    values[k] = std::move(scratch.value);
  }
  return values[node][0];
}

namespace {

struct PointProgram {
  Tape tape;
  int alpha_leaf = -1;
  std::vector<int> beta_leaves;
  int loss_node = -1;

  explicit PointProgram(const SupportModel& support) : tape(support) {}
};

// Records one data point's share of the objective: IBP barycenter of the
// softmax atoms at the softmax weights, the reconstruction cost against the
// data point, and the weighted atom-to-data costs.
PointProgram build_point_program(const LatentParams& params, int point,
                                 const Eigen::VectorXd& data_weights,
                                 const Eigen::VectorXd& data_log, const SupportModel& support,
                                 double rho, int iters) {
  const int m = static_cast<int>(params.beta.rows());
  const int n = support.size();
  PointProgram prog(support);
  Tape& t = prog.tape;

  prog.alpha_leaf = t.leaf(params.alpha.row(point).transpose());
  const int lam = t.softmax(prog.alpha_leaf);

  std::vector<int> log_atoms(m);
  for (int j = 0; j < m; ++j) {
    prog.beta_leaves.push_back(t.leaf(params.beta.row(j).transpose()));
    log_atoms[j] = t.log_softmax(prog.beta_leaves[j]);
  }

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const int zero = t.leaf(Eigen::VectorXd::Zero(n));
  const int data_leaf = t.leaf(data_log);

  // Bregman barycenter iterations.
  std::vector<int> lv(m, zero), phi(m);
  int lb = -1;
  for (int l = 0; l < iters; ++l) {
    for (int j = 0; j < m; ++j) {
      const int lu = t.sub(log_atoms[j], t.kernel_lse(lv[j]));
      phi[j] = t.kernel_lse(lu);
    }
    lb = t.weighted_combine(phi, lam);
    for (int j = 0; j < m; ++j) lv[j] = t.sub(lb, phi[j]);
  }
  const int log_bary = t.log_softmax(lb);

  // Reconstruction term: scaling loop from the barycenter to the data point.
  int lus = -1, lvs = zero;
  for (int l = 0; l < iters; ++l) {
    lus = t.sub(log_bary, t.kernel_lse(lvs));
    lvs = t.sub(data_leaf, t.kernel_lse(lus));
  }
  const int fit = t.plan_cost(lus, lvs, ones, data_weights);

  // Weighted atom-to-data costs.
  std::vector<int> atom_costs(m);
  for (int j = 0; j < m; ++j) {
    int lur = -1, lvr = zero;
    for (int l = 0; l < iters; ++l) {
      lur = t.sub(log_atoms[j], t.kernel_lse(lvr));
      lvr = t.sub(data_leaf, t.kernel_lse(lur));
    }
    atom_costs[j] = t.plan_cost(lur, lvr, ones, data_weights);
  }
  const int reg = t.dot(lam, t.stack(atom_costs));

  prog.loss_node = t.affine({fit, reg}, {1.0, rho});
  if (!t.value(prog.loss_node).allFinite()) {
    throw NumericalError("loss_and_grad: non-finite loss");
  }
  return prog;
}

void validate_inputs(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                     const SupportModel& support, double rho, int iters) {
  params.check_finite();
  if (params.alpha.rows() != static_cast<long>(data.size())) {
    throw InvalidInput("loss_and_grad: alpha rows must match the data count");
  }
  if (params.alpha.cols() != params.beta.rows()) {
    throw InvalidInput("loss_and_grad: alpha columns must match beta rows");
  }
  if (params.beta.cols() != support.size()) {
    throw InvalidInput("loss_and_grad: beta columns must match the support size");
  }
  for (const auto& mu : data) {
    if (mu.size() != support.size()) throw InvalidInput("loss_and_grad: data/support mismatch");
  }
  if (rho < 0.0) throw InvalidInput("loss_and_grad: rho must be nonnegative");
  if (iters < 1) throw InvalidInput("loss_and_grad: iters must be positive");
}

}  // namespace

LossGrad loss_and_grad(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                       const SupportModel& support, double rho, int iters) {
  validate_inputs(params, data, support, rho, iters);
  const int n = static_cast<int>(data.size());
  const int m = static_cast<int>(params.beta.rows());

  LossGrad out;
  out.grad_alpha = Eigen::MatrixXd::Zero(n, m);
  out.grad_beta = Eigen::MatrixXd::Zero(m, support.size());

  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd data_log = floored_log(data[i].weights, &out.diagnostics.floored_logs);
    try {
      PointProgram prog =
          build_point_program(params, i, data[i].weights, data_log, support, rho, iters);
      prog.tape.backward(prog.loss_node);
      out.loss += prog.tape.scalar(prog.loss_node);
      out.grad_alpha.row(i) = prog.tape.adjoint(prog.alpha_leaf).transpose();
      for (int j = 0; j < m; ++j) {
        out.grad_beta.row(j) += prog.tape.adjoint(prog.beta_leaves[j]).transpose();
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (data index " + std::to_string(i) + ")");
    }
  }
  return out;
}

double loss_value(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                  const SupportModel& support, double rho, int iters) {
  validate_inputs(params, data, support, rho, iters);
  double loss = 0.0;
  long floored = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd data_log = floored_log(data[i].weights, &floored);
    PointProgram prog = build_point_program(params, static_cast<int>(i), data[i].weights,
                                            data_log, support, rho, iters);
    loss += prog.tape.scalar(prog.loss_node);
  }
  return loss;
}

double finite_diff_check(const LatentParams& params, const std::vector<DiscreteMeasure>& data,
                         const SupportModel& support, double rho, int iters, int probes,
                         double step, Rng& rng) {
  if (probes < 1) throw InvalidInput("finite_diff_check: probes must be positive");
  const LossGrad analytic = loss_and_grad(params, data, support, rho, iters);
  const long na = params.alpha.size();
  const long nb = params.beta.size();

  double max_rel = 0.0;
  for (int p = 0; p < probes; ++p) {
    const std::size_t flat = rng.index(static_cast<std::size_t>(na + nb));
    LatentParams lo = params, hi = params;
    double grad = 0.0;
    if (flat < static_cast<std::size_t>(na)) {
      const long r = static_cast<long>(flat) / params.alpha.cols();
      const long c = static_cast<long>(flat) % params.alpha.cols();
      hi.alpha(r, c) += step;
      lo.alpha(r, c) -= step;
      grad = analytic.grad_alpha(r, c);
    } else {
      const long f = static_cast<long>(flat) - na;
      const long r = f / params.beta.cols();
      const long c = f % params.beta.cols();
      hi.beta(r, c) += step;
      lo.beta(r, c) -= step;
      grad = analytic.grad_beta(r, c);
    }
    const double fd = (loss_value(hi, data, support, rho, iters) -
                       loss_value(lo, data, support, rho, iters)) /
                      (2.0 * step);
    const double rel = std::abs(grad - fd) / std::max({std::abs(grad), std::abs(fd), 1e-6});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace geosw::ad
