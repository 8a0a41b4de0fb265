// Python bindings for the core operations: supports, entropic and exact
// transport, barycenters, the differentiable objective, dictionary fitting,
// barycentric coding, classification rules, and the evaluation metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geosw/autodiff.hpp"
#include "geosw/classify.hpp"
#include "geosw/coding.hpp"
#include "geosw/datasets.hpp"
#include "geosw/io.hpp"
#include "geosw/metrics.hpp"
#include "geosw/ot.hpp"
#include "geosw/rng.hpp"
#include "geosw/wdl.hpp"

namespace py = pybind11;
using namespace geosw;

namespace {

DiscreteMeasure measure(const Eigen::VectorXd& w) { return DiscreteMeasure::from_weights(w); }

std::vector<DiscreteMeasure> measures(const Eigen::MatrixXd& rows) {
  std::vector<DiscreteMeasure> out;
  for (long r = 0; r < rows.rows(); ++r) out.push_back(measure(rows.row(r).transpose()));
  return out;
}

Eigen::MatrixXd stack(const std::vector<DiscreteMeasure>& ms) {
  Eigen::MatrixXd rows(ms.size(), ms.empty() ? 0 : ms[0].size());
  for (std::size_t r = 0; r < ms.size(); ++r) rows.row(static_cast<long>(r)) = ms[r].weights.transpose();
  return rows;
}

classify::ReferenceSet reference_set(const std::vector<Eigen::MatrixXd>& classes) {
  classify::ReferenceSet refs;
  for (const auto& cls : classes) refs.classes.push_back(measures(cls));
  return refs;
}

wdl::FitConfig fit_config(const py::dict& cfg) {
  py::module_ json = py::module_::import("json");
  const std::string text = json.attr("dumps")(cfg).cast<std::string>();
  return io::fit_config_from_json(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropic transport, Wasserstein dictionary learning, barycentric coding";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SupportModel>(m, "Support")
      .def_readonly("points", &SupportModel::points)
      .def_readonly("cost", &SupportModel::cost)
      .def_readonly("kernel", &SupportModel::kernel)
      .def_readonly("epsilon", &SupportModel::epsilon)
      .def_property_readonly("size", &SupportModel::size)
      .def_property_readonly("dim", &SupportModel::dim);

  m.def("build_support", &build_support, py::arg("points"), py::arg("epsilon"));
  m.def("default_epsilon", &default_epsilon, py::arg("points"));
  m.def("softmax_rows", &softmax_rows, py::arg("logits"));

  m.def(
      "sinkhorn",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, const SupportModel& support,
         int iters, const std::string& estimator) {
        const auto est = estimator == "dual" ? ot::CostEstimator::DualValue
                                             : ot::CostEstimator::PlanCost;
        const auto res = ot::sinkhorn(measure(mu), measure(nu), support, iters, est);
        return py::make_tuple(res.cost, res.plan.matrix, res.marginal_error);
      },
      py::arg("mu"), py::arg("nu"), py::arg("support"), py::arg("iters"),
      py::arg("estimator") = "plan",
      "Entropic transport cost after a fixed number of scaling iterations; "
      "returns (cost, plan, marginal_error).");

  m.def(
      "exact_w2",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, const SupportModel& support) {
        const auto res = ot::exact_w2(measure(mu), measure(nu), support);
        return py::make_tuple(res.cost, res.plan.matrix);
      },
      py::arg("mu"), py::arg("nu"), py::arg("support"),
      "Exact squared 2-Wasserstein cost and plan; returns (cost, plan).");

  m.def(
      "ibp_barycenter",
      [](const Eigen::MatrixXd& atoms, const Eigen::VectorXd& lambda,
         const SupportModel& support, int iters) {
        return ot::ibp_barycenter(measures(atoms), lambda, support, iters).barycenter.weights;
      },
      py::arg("atoms"), py::arg("weights"), py::arg("support"), py::arg("iters"),
      "Fixed-support entropic barycenter (atoms are rows).");

  m.def(
      "entropic_map",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, const SupportModel& support,
         int iters) {
        const auto est = ot::entropic_map(measure(mu), measure(nu), support, iters);
        return py::make_tuple(est.images, est.valid);
      },
      py::arg("mu"), py::arg("nu"), py::arg("support"), py::arg("iters"),
      "Barycentric projection of the entropic plan; returns (images, valid_mask).");

  m.def(
      "mccann_1d",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, double t,
         const SupportModel& support) {
        return ot::mccann_1d(measure(mu), measure(nu), ot::InterpolationCoord(t), support)
            .weights;
      },
      py::arg("mu"), py::arg("nu"), py::arg("t"), py::arg("support"),
      "Displacement interpolation between 1D measures on their grid.");

  m.def(
      "verify_geodesic_extension",
      [](const Eigen::VectorXd& mu, const Eigen::VectorXd& nu, const Eigen::VectorXd& nu_tilde,
         const std::vector<double>& ts, const SupportModel& support) {
        std::vector<ot::InterpolationCoord> coords;
        for (double t : ts) coords.emplace_back(t);
        const auto check = ot::verify_geodesic_extension(measure(mu), measure(nu),
                                                         measure(nu_tilde), coords, support);
        return py::make_tuple(check.sides, check.s_values);
      },
      py::arg("mu"), py::arg("nu"), py::arg("nu_tilde"), py::arg("t_samples"),
      py::arg("support"));

  m.def(
      "loss_and_grad",
      [](const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& beta, const Eigen::MatrixXd& data,
         const SupportModel& support, double rho, int iters) {
        LatentParams params;
        params.alpha = alpha;
        params.beta = beta;
        const auto lg = ad::loss_and_grad(params, measures(data), support, rho, iters);
        return py::make_tuple(lg.loss, lg.grad_alpha, lg.grad_beta);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("data"), py::arg("support"), py::arg("rho"),
      py::arg("iters"),
      "Loss of the regularized reconstruction objective and its exact "
      "gradients with respect to the logits; returns (loss, grad_alpha, grad_beta).");

  m.def(
      "finite_diff_check",
      [](const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& beta, const Eigen::MatrixXd& data,
         const SupportModel& support, double rho, int iters, int probes, double step,
         std::uint64_t seed) {
        LatentParams params;
        params.alpha = alpha;
        params.beta = beta;
        Rng rng(seed);
        return ad::finite_diff_check(params, measures(data), support, rho, iters, probes, step,
                                     rng);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("data"), py::arg("support"), py::arg("rho"),
      py::arg("iters"), py::arg("probes") = 20, py::arg("step") = 1e-5, py::arg("seed") = 0);

  m.def(
      "fit",
      [](const Eigen::MatrixXd& data, int num_atoms, const SupportModel& support,
         const py::dict& config, int restarts) {
        const auto cfg = fit_config(config);
        const auto res = restarts > 1
                             ? wdl::fit_best_of(measures(data), num_atoms, support, cfg, restarts)
                             : wdl::fit(measures(data), num_atoms, support, cfg);
        py::dict out;
        out["atoms"] = stack(res.dictionary);
        out["coefficients"] = res.coefficients.rows;
        out["loss_trace"] = res.loss_trace;
        out["floored_logs"] = res.diagnostics.floored_logs;
        return out;
      },
      py::arg("data"), py::arg("num_atoms"), py::arg("support"),
      py::arg("config") = py::dict(), py::arg("restarts") = 1,
      "Train a dictionary; config mirrors the JSON fit configuration.");

  m.def(
      "regularizer",
      [](const Eigen::MatrixXd& dictionary, const Eigen::MatrixXd& coefficients,
         const Eigen::MatrixXd& data, const SupportModel& support, int iters) {
        return wdl::regularizer(measures(dictionary), CoefficientMatrix::from_rows(coefficients),
                                measures(data), support, iters);
      },
      py::arg("dictionary"), py::arg("coefficients"), py::arg("data"), py::arg("support"),
      py::arg("iters"));

  m.def(
      "build_problem",
      [](const Eigen::VectorXd& mu, const Eigen::MatrixXd& dictionary,
         const SupportModel& support, int iters) {
        const auto p = coding::build_problem(measure(mu), measures(dictionary), support, iters);
        return py::make_tuple(p.gram, p.cost, p.cost_shift);
      },
      py::arg("mu"), py::arg("dictionary"), py::arg("support"), py::arg("iters"),
      "Gram matrix and cost vector of the fixed-dictionary coding problem.");

  m.def(
      "solve_qp",
      [](const Eigen::MatrixXd& gram, const Eigen::VectorXd& cost) {
        coding::CodingProblem p;
        p.gram = gram;
        p.cost = cost;
        const auto sol = coding::solve_qp(p);
        return py::make_tuple(sol.lambda, sol.objective);
      },
      py::arg("gram"), py::arg("cost"));

  m.def(
      "solve_lp",
      [](const Eigen::MatrixXd& gram, const Eigen::VectorXd& cost, double tau) {
        coding::CodingProblem p;
        p.gram = gram;
        p.cost = cost;
        const auto sol = coding::solve_lp(p, tau < 0.0 ? coding::default_tau(p) : tau);
        return py::make_tuple(sol.lambda, sol.objective, sol.feasible);
      },
      py::arg("gram"), py::arg("cost"), py::arg("tau") = -1.0);

  m.def(
      "classify",
      [](const std::string& rule, const Eigen::VectorXd& test,
         const std::vector<Eigen::MatrixXd>& classes, const SupportModel& support, int iters) {
        const auto res =
            classify::score_rule(rule.c_str(), measure(test), reference_set(classes), support,
                                 iters);
        return py::make_tuple(res.label, res.scores);
      },
      py::arg("rule"), py::arg("test"), py::arg("classes"), py::arg("support"), py::arg("iters"),
      "Apply one classification rule ('1nn', 'mad', 'mbl', 'mbl_qp', 'mc'); "
      "returns (label, per-class scores).");

  m.def(
      "match_atoms",
      [](const Eigen::MatrixXd& learned, const Eigen::MatrixXd& truth,
         const SupportModel& support) {
        const auto res = bench::match_atoms(measures(learned), measures(truth), support);
        return py::make_tuple(res.permutation, res.total_cost);
      },
      py::arg("learned"), py::arg("truth"), py::arg("support"));

  m.def(
      "sparsity_histogram",
      [](const Eigen::MatrixXd& coefficients, double threshold) {
        return bench::sparsity_histogram(CoefficientMatrix::from_rows(coefficients), threshold);
      },
      py::arg("coefficients"), py::arg("threshold") = 0.95);

  m.def(
      "class_mass_confusion",
      [](const Eigen::MatrixXd& coefficients, const std::vector<int>& atom_class,
         const std::vector<int>& sample_class) {
        return bench::class_mass_confusion(CoefficientMatrix::from_rows(coefficients),
                                           atom_class, sample_class);
      },
      py::arg("coefficients"), py::arg("atom_class"), py::arg("sample_class"));

  m.def(
      "random_simplex",
      [](int m, int count, std::uint64_t seed, const std::string& sampler) {
        Rng rng(seed);
        const auto kind = sampler == "normalized_uniform" ? SimplexSampler::NormalizedUniform
                                                          : SimplexSampler::ExponentialGaps;
        Eigen::MatrixXd rows(count, m);
        for (int i = 0; i < count; ++i) rows.row(i) = rng.simplex(m, kind).transpose();
        return rows;
      },
      py::arg("m"), py::arg("count") = 1, py::arg("seed") = 0,
      py::arg("sampler") = "exponential_gaps");
}
