#include "geosw/drivers.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geosw/classify.hpp"
#include "geosw/io.hpp"
#include "geosw/ot.hpp"

namespace geosw::bench {

namespace fs = std::filesystem;

RecoveryMetrics run_recovery_experiment(const RecoveryConfig& config) {
  const SupportModel support =
      make_grid_support(config.grid_rows, config.grid_cols, config.epsilon);

  RecoveryMetrics metrics;
  for (double rho : config.rhos) {
    double acc_sparsity = 0.0, acc_diag = 0.0, acc_cost = 0.0;
    for (std::uint64_t seed : config.seeds) {
      Rng rng = Rng::derive(seed, 0x9c0ffee1);
      const auto class_atoms =
          grid_class_atoms(support, config.classes, config.atoms_per_class, config.atom_sigma,
                           config.class_radius, config.atom_jitter, rng);

      SyntheticSpec spec;
      spec.seed = Rng::derive(seed, 0xda7a).next_u64();
      for (const auto& atoms : class_atoms) {
        spec.classes.push_back({atoms, config.samples_per_class});
      }
      const SyntheticData data = generate_synthetic(spec, support, config.fit.sinkhorn_iters);

      wdl::FitConfig fit_cfg = config.fit;
      fit_cfg.rho = rho;
      fit_cfg.seed = Rng::derive(seed, 0xf17).next_u64();
      const int m = config.classes * config.atoms_per_class;
      const wdl::FitResult fit =
          wdl::fit_best_of(data.data, m, support, fit_cfg, config.restarts);

      std::vector<DiscreteMeasure> truth;
      std::vector<int> truth_labels;
      for (int c = 0; c < config.classes; ++c) {
        for (const auto& atom : class_atoms[c]) {
          truth.push_back(atom);
          truth_labels.push_back(c);
        }
      }
      const MatchResult match = match_atoms(fit.dictionary, truth, support);

      RecoveryCell cell;
      cell.rho = rho;
      cell.seed = seed;
      cell.matched_cost = match.total_cost;
      cell.final_loss = fit.loss_trace.back();
      cell.sparsity_counts = sparsity_histogram(fit.coefficients, 0.95);
      cell.mean_sparsity_k = mean_sparsity(cell.sparsity_counts);

      const std::vector<int> nearest_labels =
          label_atoms_by_nearest_data(fit.dictionary, data.data, data.labels, support);
      cell.confusion = class_mass_confusion(fit.coefficients, nearest_labels, data.labels);
      cell.confusion_diagonal = cell.confusion.diagonal().mean();

      std::vector<int> matched_labels(m);
      for (int j = 0; j < m; ++j) matched_labels[j] = truth_labels[match.permutation[j]];
      cell.confusion_diagonal_matched =
          class_mass_confusion(fit.coefficients, matched_labels, data.labels).diagonal().mean();

      acc_sparsity += cell.mean_sparsity_k;
      acc_diag += cell.confusion_diagonal;
      acc_cost += cell.matched_cost;
      metrics.cells.push_back(std::move(cell));
    }
    const double ns = static_cast<double>(config.seeds.size());
    metrics.rho_mean_sparsity.push_back(acc_sparsity / ns);
    metrics.rho_mean_confusion_diag.push_back(acc_diag / ns);
    metrics.rho_mean_matched_cost.push_back(acc_cost / ns);
  }

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    const auto out = [&](const std::string& name) { return (fs::path(config.out_dir) / name).string(); };

    std::ostringstream sparsity, confusion, costs;
    sparsity << "rho,seed,mean_k";
    const int m = config.classes * config.atoms_per_class;
    for (int k = 1; k <= m; ++k) sparsity << ",count_k" << k;
    sparsity << "\n";
    confusion << "rho,seed,row,col,mass,labeling\n";
    costs << "rho,seed,matched_cost,final_loss\n";
    for (const auto& cell : metrics.cells) {
      sparsity << io::format_double(cell.rho) << "," << cell.seed << ","
               << io::format_double(cell.mean_sparsity_k);
      for (int k = 0; k < cell.sparsity_counts.size(); ++k) {
        sparsity << "," << cell.sparsity_counts[k];
      }
      sparsity << "\n";
      for (int r = 0; r < cell.confusion.rows(); ++r) {
        for (int c = 0; c < cell.confusion.cols(); ++c) {
          confusion << io::format_double(cell.rho) << "," << cell.seed << "," << r << "," << c
                    << "," << io::format_double(cell.confusion(r, c)) << ",nearest_data\n";
        }
      }
      costs << io::format_double(cell.rho) << "," << cell.seed << ","
            << io::format_double(cell.matched_cost) << ","
            << io::format_double(cell.final_loss) << "\n";
    }
    io::write_file(out("sparsity.csv"), sparsity.str());
    io::write_file(out("confusion.csv"), confusion.str());
    io::write_file(out("matched_costs.csv"), costs.str());

    nlohmann::json summary;
    summary["rhos"] = config.rhos;
    summary["mean_sparsity_k"] = metrics.rho_mean_sparsity;
    summary["mean_confusion_diagonal"] = metrics.rho_mean_confusion_diag;
    summary["mean_matched_cost"] = metrics.rho_mean_matched_cost;
    io::write_file(out("summary.json"), summary.dump(2));
  }
  return metrics;
}

namespace {

struct TrialAccuracy {
  // accuracies[rule][ref_type 0=learned,1=random]
  std::vector<std::array<double, 2>> accuracies;
};

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::vector<AccuracyCell> run_classification_experiment(const DocBenchConfig& config) {
  if (config.trials < 1) throw InvalidInput("docbench: trials must be positive");

  // accuracy[rho][ref_count][rule][ref_type] -> per-trial values
  std::vector<AccuracyCell> cells;
  const int num_rules = static_cast<int>(config.rules.size());

  for (double rho : config.rhos) {
    for (int m : config.reference_counts) {
      std::vector<std::vector<double>> learned_acc(num_rules), random_acc(num_rules);

      for (int trial = 0; trial < config.trials; ++trial) {
        Rng rng = Rng::derive(config.seed,
                              0x10000ULL * static_cast<std::uint64_t>(trial + 1) + m);

        const int train_per_class = config.train_factor * m;
        const int docs_per_class = train_per_class + m + config.test_per_class;
        const GeneratedCorpus corpus = generate_documents(config.corpus, docs_per_class, rng);

        // Per class, the first train_per_class documents train the
        // dictionary, the next m are the random references, the rest test.
        VocabularyPolicy policy;
        std::vector<int> random_ref_ids, test_ids;
        for (int c = 0; c < config.corpus.classes; ++c) {
          const int base = c * docs_per_class;
          for (int k = 0; k < train_per_class; ++k) policy.training_docs.push_back(base + k);
          for (int k = 0; k < m; ++k) random_ref_ids.push_back(base + train_per_class + k);
          for (int k = 0; k < config.test_per_class; ++k) {
            test_ids.push_back(base + train_per_class + m + k);
          }
        }
        const IngestResult ingest =
            ingest_documents(corpus.docs, corpus.embeddings, policy, config.epsilon);

        classify::ReferenceSet learned_refs, random_refs;
        learned_refs.classes.resize(config.corpus.classes);
        random_refs.classes.resize(config.corpus.classes);
        for (int c = 0; c < config.corpus.classes; ++c) {
          std::vector<DiscreteMeasure> train;
          const int base = c * docs_per_class;
          for (int k = 0; k < train_per_class; ++k) {
            train.push_back(ingest.measures[base + k]);
          }
          wdl::FitConfig fit_cfg = config.fit;
          fit_cfg.rho = rho;
          fit_cfg.seed = Rng::derive(config.seed, 0xabc0 + 131 * trial + 7 * m + c).next_u64();
          const wdl::FitResult fit = wdl::fit(train, m, ingest.support, fit_cfg);
          learned_refs.classes[c] = fit.dictionary;
        }
        for (int c = 0; c < config.corpus.classes; ++c) {
          for (int k = 0; k < m; ++k) {
            random_refs.classes[c].push_back(ingest.measures[random_ref_ids[c * m + k]]);
          }
        }

        std::vector<std::array<long, 2>> correct(num_rules, {0, 0});
        for (int id : test_ids) {
          const DiscreteMeasure& test = ingest.measures[id];
          const int truth = corpus.docs[id].label;
          for (int r = 0; r < num_rules; ++r) {
            const auto rule = config.rules[r].c_str();
            if (classify::score_rule(rule, test, learned_refs, ingest.support,
                                     config.fit.sinkhorn_iters)
                    .label == truth) {
              ++correct[r][0];
            }
            if (classify::score_rule(rule, test, random_refs, ingest.support,
                                     config.fit.sinkhorn_iters)
                    .label == truth) {
              ++correct[r][1];
            }
          }
        }
        const double total = static_cast<double>(test_ids.size());
        for (int r = 0; r < num_rules; ++r) {
          learned_acc[r].push_back(static_cast<double>(correct[r][0]) / total);
          random_acc[r].push_back(static_cast<double>(correct[r][1]) / total);
        }
      }

      for (int r = 0; r < num_rules; ++r) {
        cells.push_back({config.rules[r], m, rho, "learned", mean_of(learned_acc[r]),
                         std_of(learned_acc[r])});
        cells.push_back({config.rules[r], m, rho, "random", mean_of(random_acc[r]),
                         std_of(random_acc[r])});
      }
    }
  }

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    std::ostringstream acc;
    acc << "rule,ref_count,rho,ref_type,mean_accuracy,std_accuracy\n";
    for (const auto& cell : cells) {
      acc << cell.rule << "," << cell.ref_count << "," << io::format_double(cell.rho) << ","
          << cell.ref_type << "," << io::format_double(cell.mean_accuracy) << ","
          << io::format_double(cell.std_accuracy) << "\n";
    }
    io::write_file((fs::path(config.out_dir) / "accuracy.csv").string(), acc.str());
  }
  return cells;
}

}  // namespace geosw::bench
