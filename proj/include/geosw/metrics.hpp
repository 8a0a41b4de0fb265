#pragma once

#include <vector>

#include <Eigen/Core>

#include "geosw/types.hpp"

namespace geosw::bench {

struct MatchResult {
  std::vector<int> permutation;  // learned atom j -> true atom permutation[j]
  double total_cost = 0.0;       // sum of matched exact costs
};

/// Assignment minimizing total cost; `cost` must be square.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Matches learned atoms to true atoms by the assignment minimizing the sum
/// of exact (unregularized) transport costs.
MatchResult match_atoms(const std::vector<DiscreteMeasure>& learned,
                        const std::vector<DiscreteMeasure>& truth, const SupportModel& support);

/// Per coefficient row, the smallest k whose k largest entries reach
/// `threshold`; returns counts indexed by k-1.
Eigen::VectorXi sparsity_histogram(const CoefficientMatrix& coefficients,
                                   double threshold = 0.95);

/// Mean of k over rows, from the histogram.
double mean_sparsity(const Eigen::VectorXi& histogram);

/// Row-normalized class-to-class coefficient mass: entry (i, j) is the mass
/// class-i samples place on class-j atoms.
Eigen::MatrixXd class_mass_confusion(const CoefficientMatrix& coefficients,
                                     const std::vector<int>& atom_class,
                                     const std::vector<int>& sample_class);

/// Labels each atom by the class of its exact-W2-closest data point.
std::vector<int> label_atoms_by_nearest_data(const std::vector<DiscreteMeasure>& atoms,
                                             const std::vector<DiscreteMeasure>& data,
                                             const std::vector<int>& data_labels,
                                             const SupportModel& support);

}  // namespace geosw::bench
