#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geosw/datasets.hpp"
#include "geosw/metrics.hpp"
#include "geosw/wdl.hpp"

namespace geosw::bench {

struct RecoveryConfig {
  int grid_rows = 12;
  int grid_cols = 12;
  int classes = 3;
  int atoms_per_class = 2;
  int samples_per_class = 15;
  double atom_sigma = 0.10;
  double class_radius = 0.30;
  double atom_jitter = 0.08;
  double epsilon = -1.0;  // <= 0 picks the default rule
  std::vector<double> rhos = {1e-3, 1e-1, 1e1};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int restarts = 1;
  wdl::FitConfig fit;  // rho and seed are overridden per cell
  std::string out_dir;  // empty: no files written
};

struct RecoveryCell {
  double rho = 0.0;
  std::uint64_t seed = 0;
  double matched_cost = 0.0;         // matched learned-vs-true atom cost
  double mean_sparsity_k = 0.0;      // mean minimal-k at 95% mass
  double confusion_diagonal = 0.0;   // mean diagonal, nearest-data labeling
  double confusion_diagonal_matched = 0.0;  // mean diagonal, matched-truth labeling
  double final_loss = 0.0;
  Eigen::VectorXi sparsity_counts;
  Eigen::MatrixXd confusion;         // nearest-data labeling
};

struct RecoveryMetrics {
  std::vector<RecoveryCell> cells;               // rho-major, then seed
  std::vector<double> rho_mean_sparsity;         // one per rho, seed-averaged
  std::vector<double> rho_mean_confusion_diag;   // one per rho, seed-averaged
  std::vector<double> rho_mean_matched_cost;
};

/// Synthetic recovery pipeline: generate class atoms and barycentric samples
/// on a grid, fit one dictionary per (rho, seed), match learned atoms to the
/// generators, and aggregate sparsity/confusion metrics per rho. Writes
/// sparsity.csv, confusion.csv, matched_costs.csv and summary.json when
/// out_dir is set.
RecoveryMetrics run_recovery_experiment(const RecoveryConfig& config);

struct DocBenchConfig {
  DocGenConfig corpus;
  std::vector<int> reference_counts = {1, 2, 4};
  std::vector<double> rhos = {0.1};
  int trials = 10;
  int test_per_class = 6;
  int train_factor = 4;  // training documents per class = train_factor * m
  double epsilon = -1.0;
  std::uint64_t seed = 0;
  wdl::FitConfig fit;  // rho and seed are overridden per trial
  std::string out_dir;
  std::vector<std::string> rules = {"1nn", "mad", "mbl", "mbl_qp", "mc"};
};

struct AccuracyCell {
  std::string rule;
  int ref_count = 0;
  double rho = 0.0;
  std::string ref_type;  // "learned" or "random"
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

/// Document-classification benchmark on the bundled synthetic corpus:
/// per trial, learn per-class dictionaries (and draw random reference
/// documents of the same count), classify held-out documents with every
/// rule, and aggregate accuracies. Writes accuracy.csv when out_dir is set.
std::vector<AccuracyCell> run_classification_experiment(const DocBenchConfig& config);

}  // namespace geosw::bench
