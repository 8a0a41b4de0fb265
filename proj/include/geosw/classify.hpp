#pragma once

#include <vector>

#include "geosw/coding.hpp"
#include "geosw/ot.hpp"
#include "geosw/types.hpp"

namespace geosw::classify {

/// Per-class reference measures, all on one shared support.
struct ReferenceSet {
  std::vector<std::vector<DiscreteMeasure>> classes;

  int num_classes() const { return static_cast<int>(classes.size()); }
  void validate(const SupportModel& support) const;
};

/// Per-class scores and the winning label. For the distance-based rules the
/// score is a cost (lower wins); for the coordinate rule it is class mass
/// (higher wins). Ties break to the lowest class index.
struct RuleResult {
  int label = 0;
  std::vector<double> scores;
};

/// Class of the reference closest to the test measure.
RuleResult score_1nn(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters);

/// Class whose references are closest on average.
RuleResult score_mad(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters);

/// Per class: estimate barycentric weights for the test measure, rebuild
/// that barycenter, score by its distance to the test measure.
RuleResult score_mbl(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters);

/// Like score_mbl, but scored directly by the quadratic objective.
RuleResult score_mbl_qp(const DiscreteMeasure& test, const ReferenceSet& refs,
                        const SupportModel& support, int iters);

/// One weight estimate over the union of all references; classes scored by
/// their share of the recovered mass.
RuleResult score_mc(const DiscreteMeasure& test, const ReferenceSet& refs,
                    const SupportModel& support, int iters);

int classify_1nn(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters);
int classify_mad(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters);
int classify_mbl(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters);
int classify_mbl_qp(const DiscreteMeasure& test, const ReferenceSet& refs,
                    const SupportModel& support, int iters);
int classify_mc(const DiscreteMeasure& test, const ReferenceSet& refs,
                const SupportModel& support, int iters);

inline const char* const kRuleNames[] = {"1nn", "mad", "mbl", "mbl_qp", "mc"};

/// Dispatch by rule name as listed in kRuleNames.
RuleResult score_rule(const char* rule, const DiscreteMeasure& test, const ReferenceSet& refs,
                      const SupportModel& support, int iters);

}  // namespace geosw::classify
