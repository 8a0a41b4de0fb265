// Command line front end: synthetic data generation, dictionary fitting,
// fixed-dictionary coding, batch classification, the recovery and document
// benchmarks, and numerical self-checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geosw/autodiff.hpp"
#include "geosw/classify.hpp"
#include "geosw/coding.hpp"
#include "geosw/datasets.hpp"
#include "geosw/drivers.hpp"
#include "geosw/io.hpp"
#include "geosw/metrics.hpp"
#include "geosw/ot.hpp"
#include "geosw/wdl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<double> epsilon;
  std::optional<int> sinkhorn_iters;
  std::optional<int> outer_iters;
  std::string out_dir = "out";
  std::string config_path;
};

void add_common(CLI::App* cmd, CommonOverrides& common) {
  cmd->add_option("--config", common.config_path, "JSON config file");
  cmd->add_option("--seed", common.seed, "Override the seed");
  cmd->add_option("--rho", common.rho, "Override the regularizer balance");
  cmd->add_option("--epsilon", common.epsilon, "Override the entropic regularization");
  cmd->add_option("--sinkhorn-iters", common.sinkhorn_iters, "Override the scaling iteration count");
  cmd->add_option("--outer-iters", common.outer_iters, "Override the optimizer iteration count");
  cmd->add_option("--out-dir", common.out_dir, "Output directory");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return json::parse(geosw::io::read_file(path));
}

geosw::wdl::FitConfig fit_config_from(const json& j, const CommonOverrides& common) {
  geosw::wdl::FitConfig cfg;
  if (j.contains("fit")) {
    cfg = geosw::io::fit_config_from_json(j.at("fit").dump());
  }
  if (common.rho) cfg.rho = *common.rho;
  if (common.seed) cfg.seed = *common.seed;
  if (common.sinkhorn_iters) cfg.sinkhorn_iters = *common.sinkhorn_iters;
  if (common.outer_iters) cfg.outer_iters = *common.outer_iters;
  cfg.validate();
  return cfg;
}

std::string out_path(const CommonOverrides& common, const std::string& name) {
  fs::create_directories(common.out_dir);
  return (fs::path(common.out_dir) / name).string();
}

int run_synth(const CommonOverrides& common) {
  const json j = load_config(common.config_path);
  const int rows = j.value("grid_rows", 12);
  const int cols = j.value("grid_cols", 12);
  const int classes = j.value("classes", 3);
  const int atoms_per_class = j.value("atoms_per_class", 2);
  const int samples_per_class = j.value("samples_per_class", 15);
  const double sigma = j.value("atom_sigma", 0.10);
  const double class_radius = j.value("class_radius", 0.30);
  const double atom_jitter = j.value("atom_jitter", 0.08);
  const int iters = common.sinkhorn_iters.value_or(j.value("sinkhorn_iters", 25));
  const double epsilon = common.epsilon.value_or(j.value("epsilon", -1.0));
  const std::uint64_t seed = common.seed.value_or(j.value("seed", 0));

  const auto support = geosw::bench::make_grid_support(rows, cols, epsilon);
  geosw::Rng rng = geosw::Rng::derive(seed, 0x9c0ffee1);
  const auto class_atoms = geosw::bench::grid_class_atoms(support, classes, atoms_per_class,
                                                          sigma, class_radius, atom_jitter, rng);
  geosw::bench::SyntheticSpec spec;
  spec.seed = geosw::Rng::derive(seed, 0xda7a).next_u64();
  for (const auto& atoms : class_atoms) spec.classes.push_back({atoms, samples_per_class});
  const auto data = geosw::bench::generate_synthetic(spec, support, iters);

  geosw::io::write_support(out_path(common, "support.csv"), support);
  geosw::io::write_measures(out_path(common, "data.csv"), data.data);
  geosw::io::write_labels(out_path(common, "labels.csv"), data.labels);

  std::vector<geosw::DiscreteMeasure> atoms_flat;
  std::vector<int> atom_labels;
  for (int c = 0; c < classes; ++c) {
    for (const auto& atom : class_atoms[c]) {
      atoms_flat.push_back(atom);
      atom_labels.push_back(c);
    }
  }
  geosw::io::write_measures(out_path(common, "atoms_true.csv"), atoms_flat);
  geosw::io::write_labels(out_path(common, "atom_labels.csv"), atom_labels);

  Eigen::MatrixXd weights(data.true_weights.size(), atoms_per_class);
  for (std::size_t i = 0; i < data.true_weights.size(); ++i) {
    weights.row(static_cast<long>(i)) = data.true_weights[i].transpose();
  }
  geosw::io::write_csv_matrix(out_path(common, "weights_true.csv"), weights);

  json meta;
  meta["epsilon"] = support.epsilon;
  meta["grid_rows"] = rows;
  meta["grid_cols"] = cols;
  meta["seed"] = seed;
  geosw::io::write_file(out_path(common, "meta.json"), meta.dump(2));
  std::printf("synth: wrote %d samples on a %dx%d grid to %s\n",
              static_cast<int>(data.data.size()), rows, cols, common.out_dir.c_str());
  return 0;
}

int run_fit(const CommonOverrides& common, const std::string& support_path,
            const std::string& data_path, int m, int restarts) {
  const json j = load_config(common.config_path);
  const double epsilon = common.epsilon.value_or(j.value("epsilon", -1.0));
  const auto support = geosw::io::read_support(support_path, epsilon);
  const auto data = geosw::io::read_measures(data_path);
  auto cfg = fit_config_from(j, common);

  const auto res = restarts > 1 ? geosw::wdl::fit_best_of(data, m, support, cfg, restarts)
                                : geosw::wdl::fit(data, m, support, cfg);

  geosw::io::write_measures(out_path(common, "atoms.csv"), res.dictionary);
  geosw::io::write_csv_matrix(out_path(common, "coefficients.csv"), res.coefficients.rows);
  Eigen::MatrixXd trace(res.loss_trace.size(), 1);
  for (std::size_t k = 0; k < res.loss_trace.size(); ++k) trace(static_cast<long>(k), 0) = res.loss_trace[k];
  geosw::io::write_csv_matrix(out_path(common, "loss_trace.csv"), trace, {"loss"});
  geosw::io::write_file(out_path(common, "diagnostics.json"),
                        geosw::io::diagnostics_to_json(res.diagnostics));
  std::printf("fit: %d atoms, final loss %.6g, wrote results to %s\n", m,
              res.loss_trace.back(), common.out_dir.c_str());
  return 0;
}

int run_code(const CommonOverrides& common, const std::string& support_path,
             const std::string& atoms_path, const std::string& measures_path, double tau,
             bool dump_problems) {
  const json j = load_config(common.config_path);
  const double epsilon = common.epsilon.value_or(j.value("epsilon", -1.0));
  const int iters = common.sinkhorn_iters.value_or(j.value("sinkhorn_iters", 100));
  const auto support = geosw::io::read_support(support_path, epsilon);
  const auto dictionary = geosw::io::read_measures(atoms_path);
  const auto measures = geosw::io::read_measures(measures_path);
  const int m = static_cast<int>(dictionary.size());

  std::ostringstream codes;
  codes << "measure";
  for (int k = 0; k < m; ++k) codes << ",qp_lambda" << k;
  codes << ",qp_objective";
  for (int k = 0; k < m; ++k) codes << ",lp_lambda" << k;
  codes << ",lp_objective,lp_feasible,tau\n";

  for (std::size_t i = 0; i < measures.size(); ++i) {
    const auto problem = geosw::coding::build_problem(measures[i], dictionary, support, iters);
    const auto qp = geosw::coding::solve_qp(problem);
    const double tau_i = tau >= 0.0 ? tau : geosw::coding::default_tau(problem);
    const auto lp = geosw::coding::solve_lp(problem, tau_i);
    codes << i;
    for (int k = 0; k < m; ++k) codes << "," << geosw::io::format_double(qp.lambda[k]);
    codes << "," << geosw::io::format_double(qp.objective);
    for (int k = 0; k < m; ++k) codes << "," << geosw::io::format_double(lp.lambda[k]);
    codes << "," << geosw::io::format_double(lp.objective) << "," << (lp.feasible ? 1 : 0) << ","
          << geosw::io::format_double(tau_i) << "\n";
    if (dump_problems) {
      geosw::io::write_file(out_path(common, "problem_" + std::to_string(i) + ".json"),
                            geosw::coding::problem_to_json(problem));
    }
  }
  geosw::io::write_file(out_path(common, "codes.csv"), codes.str());
  std::printf("code: coded %d measures against %d atoms, wrote %s\n",
              static_cast<int>(measures.size()), m, out_path(common, "codes.csv").c_str());
  return 0;
}

int run_classify(const CommonOverrides& common, const std::string& support_path,
                 const std::string& refs_path, const std::string& ref_labels_path,
                 const std::string& tests_path, const std::string& rules_arg) {
  const json j = load_config(common.config_path);
  const double epsilon = common.epsilon.value_or(j.value("epsilon", -1.0));
  const int iters = common.sinkhorn_iters.value_or(j.value("sinkhorn_iters", 100));
  const auto support = geosw::io::read_support(support_path, epsilon);
  const auto refs_flat = geosw::io::read_measures(refs_path);
  const auto labels = geosw::io::read_labels(ref_labels_path);
  const auto tests = geosw::io::read_measures(tests_path);
  if (labels.size() != refs_flat.size()) {
    throw geosw::InvalidInput("classify: reference/label count mismatch");
  }

  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  geosw::classify::ReferenceSet refs;
  refs.classes.resize(num_classes);
  for (std::size_t k = 0; k < refs_flat.size(); ++k) {
    refs.classes[labels[k]].push_back(refs_flat[k]);
  }

  std::vector<std::string> rules;
  if (rules_arg == "all") {
    for (const char* r : geosw::classify::kRuleNames) rules.push_back(r);
  } else {
    std::istringstream ss(rules_arg);
    std::string item;
    while (std::getline(ss, item, ',')) rules.push_back(item);
  }

  std::ostringstream outcsv;
  outcsv << "test_id,rule,predicted_class";
  for (int c = 0; c < num_classes; ++c) outcsv << ",score_class" << c;
  outcsv << "\n";
  for (std::size_t t = 0; t < tests.size(); ++t) {
    for (const auto& rule : rules) {
      const auto res = geosw::classify::score_rule(rule.c_str(), tests[t], refs, support, iters);
      outcsv << t << "," << rule << "," << res.label;
      for (double s : res.scores) outcsv << "," << geosw::io::format_double(s);
      outcsv << "\n";
    }
  }
  geosw::io::write_file(out_path(common, "classify.csv"), outcsv.str());
  std::printf("classify: %d tests x %d rules, wrote %s\n", static_cast<int>(tests.size()),
              static_cast<int>(rules.size()), out_path(common, "classify.csv").c_str());
  return 0;
}

int run_recover(const CommonOverrides& common) {
  const json j = load_config(common.config_path);
  geosw::bench::RecoveryConfig cfg;
  cfg.grid_rows = j.value("grid_rows", cfg.grid_rows);
  cfg.grid_cols = j.value("grid_cols", cfg.grid_cols);
  cfg.classes = j.value("classes", cfg.classes);
  cfg.atoms_per_class = j.value("atoms_per_class", cfg.atoms_per_class);
  cfg.samples_per_class = j.value("samples_per_class", cfg.samples_per_class);
  cfg.atom_sigma = j.value("atom_sigma", cfg.atom_sigma);
  cfg.class_radius = j.value("class_radius", cfg.class_radius);
  cfg.atom_jitter = j.value("atom_jitter", cfg.atom_jitter);
  cfg.restarts = j.value("restarts", cfg.restarts);
  if (j.contains("rhos")) cfg.rhos = j.at("rhos").get<std::vector<double>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.epsilon = common.epsilon.value_or(j.value("epsilon", cfg.epsilon));
  cfg.fit = fit_config_from(j, common);
  if (common.rho) cfg.rhos = {*common.rho};
  if (common.seed) cfg.seeds = {*common.seed};
  cfg.out_dir = common.out_dir;

  const auto metrics = geosw::bench::run_recovery_experiment(cfg);
  for (std::size_t r = 0; r < cfg.rhos.size(); ++r) {
    std::printf("recover: rho=%-8g mean_sparsity_k=%.3f confusion_diag=%.3f matched_cost=%.5g\n",
                cfg.rhos[r], metrics.rho_mean_sparsity[r], metrics.rho_mean_confusion_diag[r],
                metrics.rho_mean_matched_cost[r]);
  }
  return 0;
}

int run_docbench(const CommonOverrides& common) {
  const json j = load_config(common.config_path);
  geosw::bench::DocBenchConfig cfg;
  cfg.corpus.classes = j.value("classes", cfg.corpus.classes);
  cfg.corpus.vocab_per_class = j.value("vocab_per_class", cfg.corpus.vocab_per_class);
  cfg.corpus.shared_vocab = j.value("shared_vocab", cfg.corpus.shared_vocab);
  cfg.corpus.embed_dim = j.value("embed_dim", cfg.corpus.embed_dim);
  cfg.corpus.cluster_spread = j.value("cluster_spread", cfg.corpus.cluster_spread);
  cfg.corpus.temperature = j.value("temperature", cfg.corpus.temperature);
  cfg.corpus.doc_log_noise = j.value("doc_log_noise", cfg.corpus.doc_log_noise);
  cfg.corpus.tokens_per_doc = j.value("tokens_per_doc", cfg.corpus.tokens_per_doc);
  if (j.contains("reference_counts")) {
    cfg.reference_counts = j.at("reference_counts").get<std::vector<int>>();
  }
  if (j.contains("rhos")) cfg.rhos = j.at("rhos").get<std::vector<double>>();
  cfg.trials = j.value("trials", cfg.trials);
  cfg.test_per_class = j.value("test_per_class", cfg.test_per_class);
  cfg.train_factor = j.value("train_factor", cfg.train_factor);
  cfg.epsilon = common.epsilon.value_or(j.value("epsilon", cfg.epsilon));
  cfg.seed = common.seed.value_or(j.value("seed", 0));
  cfg.fit = fit_config_from(j, common);
  if (common.rho) cfg.rhos = {*common.rho};
  if (j.contains("rules")) cfg.rules = j.at("rules").get<std::vector<std::string>>();
  cfg.out_dir = common.out_dir;

  const auto cells = geosw::bench::run_classification_experiment(cfg);
  for (const auto& cell : cells) {
    std::printf("docbench: rule=%-7s refs=%-3d rho=%-6g %-7s acc=%.3f +- %.3f\n",
                cell.rule.c_str(), cell.ref_count, cell.rho, cell.ref_type.c_str(),
                cell.mean_accuracy, cell.std_accuracy);
  }
  return 0;
}

int run_verify(const CommonOverrides& common, int probes, int instances) {
  const json j = load_config(common.config_path);
  (void)j;
  int failures = 0;

  // Gradient check on a small randomized fixture.
  {
    const std::uint64_t seed = common.seed.value_or(0);
    geosw::Rng rng = geosw::Rng::derive(seed, 0x6ead);
    Eigen::MatrixXd points(5, 1);
    for (int i = 0; i < 5; ++i) points(i, 0) = i / 4.0;
    const auto support = geosw::build_support(points, common.epsilon.value_or(0.05));
    std::vector<geosw::DiscreteMeasure> data;
    for (int i = 0; i < 2; ++i) {
      data.push_back(geosw::DiscreteMeasure::from_weights(rng.simplex(5)));
    }
    geosw::LatentParams params;
    params.alpha.resize(2, 2);
    params.beta.resize(2, 5);
    for (int i = 0; i < params.alpha.size(); ++i) params.alpha(i / 2, i % 2) = rng.uniform(-1, 1);
    for (int i = 0; i < params.beta.size(); ++i) params.beta(i / 5, i % 5) = rng.uniform(-1, 1);
    const int iters = common.sinkhorn_iters.value_or(10);
    const double err = geosw::ad::finite_diff_check(params, data, support,
                                                    common.rho.value_or(0.25), iters, probes,
                                                    1e-5, rng);
    const bool ok = err < 1e-4;
    std::printf("[%s] gradient check: max relative error %.3g over %d probes (tolerance 1e-4)\n",
                ok ? "PASS" : "FAIL", err, probes);
    failures += ok ? 0 : 1;
  }

  // Geodesic-extension inequality sweep on randomized 1D instances.
  {
    geosw::Rng rng = geosw::Rng::derive(common.seed.value_or(0), 0x6e0);
    double worst = 0.0;
    int violations = 0;
    for (int rep = 0; rep < instances; ++rep) {
      const double r = rng.uniform(0.25, 0.75);
      std::vector<double> ts = {rng.uniform(0.1, 0.45), rng.uniform(0.55, 0.9)};
      const auto inst = geosw::bench::random_extension_instance_1d(rng, 3, r, ts, 0.15, 1.0);
      const auto nu = inst.interpolate(r);
      const auto check = geosw::ot::verify_geodesic_extension(
          inst.measure_a, nu, inst.measure_b,
          {geosw::ot::InterpolationCoord(ts[0]), geosw::ot::InterpolationCoord(ts[1])},
          inst.support);
      for (const auto& [lhs, rhs] : check.sides) {
        const double slack = (lhs - rhs) / std::max(1.0, std::abs(rhs));
        worst = std::max(worst, slack);
        if (slack > 1e-6) ++violations;
      }
    }
    const bool ok = violations == 0;
    std::printf("[%s] geodesic extension sweep: %d instances, worst relative slack %.3g "
                "(tolerance 1e-6)\n",
                ok ? "PASS" : "FAIL", instances, worst);
    failures += ok ? 0 : 1;
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic transport, Wasserstein dictionary learning, barycentric coding"};
  app.require_subcommand(1);

  CommonOverrides synth_common, fit_common, code_common, classify_common, recover_common,
      docbench_common, verify_common;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic barycentric dataset");
  add_common(synth, synth_common);

  auto* fit = app.add_subcommand("fit", "Train a dictionary on measures");
  add_common(fit, fit_common);
  std::string fit_support, fit_data;
  int fit_m = 2, fit_restarts = 1;
  fit->add_option("--support", fit_support, "Support CSV")->required();
  fit->add_option("--data", fit_data, "Measures CSV")->required();
  fit->add_option("--m", fit_m, "Number of atoms")->required();
  fit->add_option("--restarts", fit_restarts, "Restart count (best run kept)");

  auto* code = app.add_subcommand("code", "Fixed-dictionary barycentric coding (QP and LP)");
  add_common(code, code_common);
  std::string code_support, code_atoms, code_measures;
  double code_tau = -1.0;
  bool code_dump = false;
  code->add_option("--support", code_support, "Support CSV")->required();
  code->add_option("--atoms", code_atoms, "Dictionary measures CSV")->required();
  code->add_option("--measures", code_measures, "Measures to code, CSV")->required();
  code->add_option("--tau", code_tau, "LP relaxation level (default 10 x QP minimum)");
  code->add_flag("--dump-problems", code_dump, "Write per-measure problem JSON");

  auto* cls = app.add_subcommand("classify", "Batch reference-based classification");
  add_common(cls, classify_common);
  std::string cls_support, cls_refs, cls_labels, cls_tests, cls_rules = "all";
  cls->add_option("--support", cls_support, "Support CSV")->required();
  cls->add_option("--refs", cls_refs, "Reference measures CSV")->required();
  cls->add_option("--ref-labels", cls_labels, "Reference class labels CSV")->required();
  cls->add_option("--tests", cls_tests, "Test measures CSV")->required();
  cls->add_option("--rules", cls_rules, "Comma-separated rules or 'all'");

  auto* recover = app.add_subcommand("recover", "Synthetic recovery benchmark");
  add_common(recover, recover_common);

  auto* docbench = app.add_subcommand("docbench", "Document classification benchmark");
  add_common(docbench, docbench_common);

  auto* verify = app.add_subcommand("verify", "Gradient and geodesic self-checks");
  add_common(verify, verify_common);
  int verify_probes = 50, verify_instances = 200;
  verify->add_option("--probes", verify_probes, "Gradient probe count");
  verify->add_option("--instances", verify_instances, "Geodesic instance count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_common);
    if (fit->parsed()) return run_fit(fit_common, fit_support, fit_data, fit_m, fit_restarts);
    if (code->parsed()) {
      return run_code(code_common, code_support, code_atoms, code_measures, code_tau, code_dump);
    }
    if (cls->parsed()) {
      return run_classify(classify_common, cls_support, cls_refs, cls_labels, cls_tests,
                          cls_rules);
    }
    if (recover->parsed()) return run_recover(recover_common);
    if (docbench->parsed()) return run_docbench(docbench_common);
    if (verify->parsed()) return run_verify(verify_common, verify_probes, verify_instances);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
