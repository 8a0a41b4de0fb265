#include "geosw/classify.hpp"

#include <cstring>
#include <limits>

namespace geosw::classify {

void ReferenceSet::validate(const SupportModel& support) const {
  if (classes.empty()) throw InvalidInput("ReferenceSet: no classes");
  for (const auto& cls : classes) {
    if (cls.empty()) throw InvalidInput("ReferenceSet: empty class");
    for (const auto& ref : cls) {
      if (ref.size() != support.size()) throw InvalidInput("ReferenceSet: support mismatch");
    }
  }
}

namespace {

int lowest_argmin(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] < v[best]) best = static_cast<int>(k);
  }
  return best;
}

int lowest_argmax(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

RuleResult score_1nn(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters) {
  refs.validate(support);
  RuleResult res;
  for (const auto& cls : refs.classes) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ref : cls) {
      best = std::min(best, ot::sinkhorn(test, ref, support, iters).cost);
    }
    res.scores.push_back(best);
  }
  res.label = lowest_argmin(res.scores);
  return res;
}

RuleResult score_mad(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters) {
  refs.validate(support);
  RuleResult res;
  for (const auto& cls : refs.classes) {
    double total = 0.0;
    for (const auto& ref : cls) total += ot::sinkhorn(test, ref, support, iters).cost;
    res.scores.push_back(total / static_cast<double>(cls.size()));
  }
  res.label = lowest_argmin(res.scores);
  return res;
}

RuleResult score_mbl(const DiscreteMeasure& test, const ReferenceSet& refs,
                     const SupportModel& support, int iters) {
  refs.validate(support);
  RuleResult res;
  for (const auto& cls : refs.classes) {
    const auto problem = coding::build_problem(test, cls, support, iters);
    const auto qp = coding::solve_qp(problem);
    const auto bary = ot::ibp_barycenter(cls, qp.lambda, support, iters);
    res.scores.push_back(ot::sinkhorn(bary.barycenter, test, support, iters).cost);
  }
  res.label = lowest_argmin(res.scores);
  return res;
}

RuleResult score_mbl_qp(const DiscreteMeasure& test, const ReferenceSet& refs,
                        const SupportModel& support, int iters) {
  refs.validate(support);
  RuleResult res;
  for (const auto& cls : refs.classes) {
    const auto problem = coding::build_problem(test, cls, support, iters);
    res.scores.push_back(coding::solve_qp(problem).objective);
  }
  res.label = lowest_argmin(res.scores);
  return res;
}

RuleResult score_mc(const DiscreteMeasure& test, const ReferenceSet& refs,
                    const SupportModel& support, int iters) {
  refs.validate(support);
  std::vector<DiscreteMeasure> pool;
  std::vector<int> owner;
  for (int c = 0; c < refs.num_classes(); ++c) {
    for (const auto& ref : refs.classes[c]) {
      pool.push_back(ref);
      owner.push_back(c);
    }
  }
  const auto problem = coding::build_problem(test, pool, support, iters);
  const auto qp = coding::solve_qp(problem);

  RuleResult res;
  res.scores.assign(refs.classes.size(), 0.0);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    res.scores[owner[k]] += qp.lambda[static_cast<int>(k)];
  }
  res.label = lowest_argmax(res.scores);
  return res;
}

int classify_1nn(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters) {
  return score_1nn(test, refs, support, iters).label;
}
int classify_mad(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters) {
  return score_mad(test, refs, support, iters).label;
}
int classify_mbl(const DiscreteMeasure& test, const ReferenceSet& refs,
                 const SupportModel& support, int iters) {
  return score_mbl(test, refs, support, iters).label;
}
int classify_mbl_qp(const DiscreteMeasure& test, const ReferenceSet& refs,
                    const SupportModel& support, int iters) {
  return score_mbl_qp(test, refs, support, iters).label;
}
int classify_mc(const DiscreteMeasure& test, const ReferenceSet& refs,
                const SupportModel& support, int iters) {
  return score_mc(test, refs, support, iters).label;
}

RuleResult score_rule(const char* rule, const DiscreteMeasure& test, const ReferenceSet& refs,
                      const SupportModel& support, int iters) {
  if (std::strcmp(rule, "1nn") == 0) return score_1nn(test, refs, support, iters);
  if (std::strcmp(rule, "mad") == 0) return score_mad(test, refs, support, iters);
  if (std::strcmp(rule, "mbl") == 0) return score_mbl(test, refs, support, iters);
  if (std::strcmp(rule, "mbl_qp") == 0) return score_mbl_qp(test, refs, support, iters);
  if (std::strcmp(rule, "mc") == 0) return score_mc(test, refs, support, iters);
  throw InvalidInput(std::string("score_rule: unknown rule ") + rule);
}

}  // namespace geosw::classify
