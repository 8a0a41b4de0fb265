#include "geosw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geosw/ot.hpp"

namespace geosw::bench {

// Shortest augmenting path assignment (Jonker-Volgenant style) with dual
// potentials; O(n^3).
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidInput("solve_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

MatchResult match_atoms(const std::vector<DiscreteMeasure>& learned,
                        const std::vector<DiscreteMeasure>& truth, const SupportModel& support) {
  if (learned.size() != truth.size()) throw InvalidInput("match_atoms: unequal atom counts");
  const int m = static_cast<int>(learned.size());
  Eigen::MatrixXd cost(m, m);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      cost(j, k) = ot::exact_w2(learned[j], truth[k], support).cost;
    }
  }
  MatchResult res;
  res.permutation = solve_assignment(cost);
  for (int j = 0; j < m; ++j) res.total_cost += cost(j, res.permutation[j]);
  return res;
}

Eigen::VectorXi sparsity_histogram(const CoefficientMatrix& coefficients, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidInput("sparsity_histogram: threshold must lie in (0, 1]");
  }
  const int m = coefficients.m();
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(m);
  std::vector<double> row(m);
  for (int i = 0; i < coefficients.n(); ++i) {
    for (int j = 0; j < m; ++j) row[j] = coefficients.rows(i, j);
    std::sort(row.begin(), row.end(), std::greater<>());
    double acc = 0.0;
    int k = m;
    for (int j = 0; j < m; ++j) {
      acc += row[j];
      if (acc >= threshold) {
        k = j + 1;
        break;
      }
    }
    ++counts[k - 1];
  }
  return counts;
}

double mean_sparsity(const Eigen::VectorXi& histogram) {
  long total = 0;
  double weighted = 0.0;
  for (int k = 0; k < histogram.size(); ++k) {
    total += histogram[k];
    weighted += static_cast<double>(histogram[k]) * (k + 1);
  }
  return total > 0 ? weighted / static_cast<double>(total) : 0.0;
}

Eigen::MatrixXd class_mass_confusion(const CoefficientMatrix& coefficients,
                                     const std::vector<int>& atom_class,
                                     const std::vector<int>& sample_class) {
  if (static_cast<int>(atom_class.size()) != coefficients.m()) {
    throw InvalidInput("class_mass_confusion: atom label count mismatch");
  }
  if (static_cast<int>(sample_class.size()) != coefficients.n()) {
    throw InvalidInput("class_mass_confusion: sample label count mismatch");
  }
  int num_classes = 0;
  for (int c : atom_class) {
    if (c < 0) throw InvalidInput("class_mass_confusion: unlabeled atom");
    num_classes = std::max(num_classes, c + 1);
  }
  for (int c : sample_class) {
    if (c < 0) throw InvalidInput("class_mass_confusion: unlabeled sample");
    num_classes = std::max(num_classes, c + 1);
  }

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(num_classes, num_classes);
  for (int i = 0; i < coefficients.n(); ++i) {
    for (int j = 0; j < coefficients.m(); ++j) {
      mass(sample_class[i], atom_class[j]) += coefficients.rows(i, j);
    }
  }
  for (int r = 0; r < num_classes; ++r) {
    const double total = mass.row(r).sum();
    if (total > 0.0) mass.row(r) /= total;
  }
  return mass;
}

std::vector<int> label_atoms_by_nearest_data(const std::vector<DiscreteMeasure>& atoms,
                                             const std::vector<DiscreteMeasure>& data,
                                             const std::vector<int>& data_labels,
                                             const SupportModel& support) {
  if (data.size() != data_labels.size()) {
    throw InvalidInput("label_atoms_by_nearest_data: label count mismatch");
  }
  std::vector<int> labels;
  for (const auto& atom : atoms) {
    double best = std::numeric_limits<double>::infinity();
    int best_label = -1;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double c = ot::exact_w2(atom, data[i], support).cost;
      if (c < best) {
        best = c;
        best_label = data_labels[i];
      }
    }
    labels.push_back(best_label);
  }
  return labels;
}

}  // namespace geosw::bench
