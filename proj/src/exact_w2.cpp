#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geosw/ot.hpp"

namespace geosw::ot {

namespace {

// Transportation network simplex on the complete bipartite graph between
// positive-mass sources and sinks. Nodes 0..ns-1 are sources, ns..ns+nt-1
// sinks; the basis is a spanning tree stored through parent pointers, with
// the flow of each tree arc kept on its child node.
class TransportSimplex {
public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   const Eigen::MatrixXd& full_cost, const std::vector<int>& src_ids,
                   const std::vector<int>& snk_ids)
      : supply_(std::move(supply)),
        demand_(std::move(demand)),
        ns_(static_cast<int>(supply_.size())),
        nt_(static_cast<int>(demand_.size())),
        cost_(ns_, nt_) {
    for (int i = 0; i < ns_; ++i) {
      for (int j = 0; j < nt_; ++j) cost_(i, j) = full_cost(src_ids[i], snk_ids[j]);
    }
  }

  // Returns the optimal flows as a dense ns x nt matrix.
  Eigen::MatrixXd solve() {
    northwest_corner();
    rebuild_tree();

    const double tol = 1e-12 * (1.0 + cost_.maxCoeff());
    const long pivot_cap = 1000 + 64L * (ns_ + nt_);
    const long bland_after = 8L * (ns_ + nt_);
    long degenerate_streak = 0;

    for (long pivot = 0; pivot < pivot_cap; ++pivot) {
      int ei = -1, ej = -1;
      if (!find_entering(tol, degenerate_streak > bland_after, ei, ej)) {
        return flows_as_matrix();
      }
      const double theta = apply_pivot(ei, ej);
      degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
      rebuild_tree();
    }
    throw NumericalError("exact_w2: simplex pivot limit reached");
  }

private:
  int nodes() const { return ns_ + nt_; }

  void northwest_corner() {
    basic_.assign(ns_, std::vector<int>());
    flow_.assign(ns_, std::vector<double>());
    int i = 0, j = 0;
    double a = supply_[0], b = demand_[0];
    while (true) {
      basic_[i].push_back(j);
      flow_[i].push_back(std::min(a, b));
      if (i == ns_ - 1 && j == nt_ - 1) break;
      if (a <= b && i < ns_ - 1) {
        b -= a;
        ++i;
        a = supply_[i];
      } else if (j < nt_ - 1) {
        a -= b;
        ++j;
        b = demand_[j];
      } else {
        b -= a;
        ++i;
        a = supply_[i];
      }
    }
  }

  // Parent/depth/potential arrays recomputed from the basic-cell lists.
  void rebuild_tree() {
    const int nn = nodes();
    std::vector<std::vector<std::pair<int, double>>> adj(nn);  // (neighbor, flow)
    for (int i = 0; i < ns_; ++i) {
      for (std::size_t k = 0; k < basic_[i].size(); ++k) {
        const int j = ns_ + basic_[i][k];
        adj[i].emplace_back(j, flow_[i][k]);
        adj[j].emplace_back(i, flow_[i][k]);
      }
    }
    parent_.assign(nn, -1);
    depth_.assign(nn, 0);
    potential_.assign(nn, 0.0);
    flow_to_parent_.assign(nn, 0.0);
    std::vector<int> stack = {0};
    std::vector<char> seen(nn, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [w, f] : adj[u]) {
        if (seen[w]) continue;
        seen[w] = 1;
        parent_[w] = u;
        depth_[w] = depth_[u] + 1;
        flow_to_parent_[w] = f;
        const double c = u < ns_ ? cost_(u, w - ns_) : cost_(w, u - ns_);
        potential_[w] = c - potential_[u];
        stack.push_back(w);
      }
    }
  }

  // Most negative reduced cost (or first under Bland's rule when cycling is
  // suspected). Returns false at optimality.
  bool find_entering(double tol, bool bland, int& ei, int& ej) const {
    double best = -tol;
    ei = -1;
    for (int i = 0; i < ns_; ++i) {
      for (int j = 0; j < nt_; ++j) {
        const double rc = cost_(i, j) - potential_[i] - potential_[ns_ + j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (bland) return true;
        }
      }
    }
    return ei >= 0;
  }

  struct CycleArc {
    int child;    // tree arc identified by its child node
    int sign;     // +1 gains flow, -1 loses
  };

  double apply_pivot(int ei, int ej) {
    // Close the cycle through the tree path between the entering arc's
    // endpoints; signs alternate starting with -1 next to either endpoint.
    std::vector<CycleArc> arcs;
    int a = ei, b = ns_ + ej;
    int sign_a = -1, sign_b = -1;
    while (depth_[a] > depth_[b]) {
      arcs.push_back({a, sign_a});
      sign_a = -sign_a;
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      arcs.push_back({b, sign_b});
      sign_b = -sign_b;
      b = parent_[b];
    }
    while (a != b) {
      arcs.push_back({a, sign_a});
      sign_a = -sign_a;
      arcs.push_back({b, sign_b});
      sign_b = -sign_b;
      a = parent_[a];
      b = parent_[b];
    }

    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (const auto& arc : arcs) {
      if (arc.sign < 0 && flow_to_parent_[arc.child] < theta) {
        theta = flow_to_parent_[arc.child];
        leaving = arc.child;
      }
    }
    if (leaving < 0) throw NumericalError("exact_w2: unbounded pivot");

    for (const auto& arc : arcs) set_flow(arc.child, flow_on(arc.child) + arc.sign * theta);
    remove_basic(leaving);
    add_basic(ei, ej, theta);
    return theta;
  }

  double flow_on(int child) const { return flow_to_parent_[child]; }

  void set_flow(int child, double f) {
    flow_to_parent_[child] = f;
    const int p = parent_[child];
    const int i = child < ns_ ? child : p;
    const int j = child < ns_ ? p - ns_ : child - ns_;
    for (std::size_t k = 0; k < basic_[i].size(); ++k) {
      if (basic_[i][k] == j) {
        flow_[i][k] = f;
        return;
      }
    }
  }

  void remove_basic(int child) {
    const int p = parent_[child];
    const int i = child < ns_ ? child : p;
    const int j = child < ns_ ? p - ns_ : child - ns_;
    for (std::size_t k = 0; k < basic_[i].size(); ++k) {
      if (basic_[i][k] == j) {
        basic_[i].erase(basic_[i].begin() + static_cast<long>(k));
        flow_[i].erase(flow_[i].begin() + static_cast<long>(k));
        return;
      }
    }
  }

  void add_basic(int i, int j, double f) {
    basic_[i].push_back(j);
    flow_[i].push_back(f);
  }

  Eigen::MatrixXd flows_as_matrix() const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(ns_, nt_);
    for (int i = 0; i < ns_; ++i) {
      for (std::size_t k = 0; k < basic_[i].size(); ++k) x(i, basic_[i][k]) = flow_[i][k];
    }
    return x;
  }

  std::vector<double> supply_, demand_;
  int ns_, nt_;
  Eigen::MatrixXd cost_;
  std::vector<std::vector<int>> basic_;     // basic sink indices per source
  std::vector<std::vector<double>> flow_;   // flows aligned with basic_
  std::vector<int> parent_, depth_;
  std::vector<double> potential_, flow_to_parent_;
};

}  // namespace

ExactResult exact_w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const SupportModel& support) {
  const int n = support.size();
  if (mu.size() != n || nu.size() != n) throw InvalidInput("exact_w2: measure/support mismatch");
  if (n > 4096) throw InvalidInput("exact_w2: support size exceeds the N <= 4096 guard");

  std::vector<int> src_ids, snk_ids;
  std::vector<double> supply, demand;
  for (int i = 0; i < n; ++i) {
    if (mu.weights[i] > 0.0) {
      src_ids.push_back(i);
      supply.push_back(mu.weights[i]);
    }
    if (nu.weights[i] > 0.0) {
      snk_ids.push_back(i);
      demand.push_back(nu.weights[i]);
    }
  }
  // Renormalized measures can miss exact balance by a few ulp; the simplex
  // needs supply and demand totals to match exactly.
  double ssum = 0.0, dsum = 0.0;
  for (double s : supply) ssum += s;
  for (double d : demand) dsum += d;
  for (double& s : supply) s /= ssum;
  for (double& d : demand) d /= dsum;

  TransportSimplex simplex(supply, demand, support.cost, src_ids, snk_ids);
  const Eigen::MatrixXd x = simplex.solve();

  ExactResult res;
  res.plan.matrix = Eigen::MatrixXd::Zero(n, n);
  res.cost = 0.0;
  for (int a = 0; a < static_cast<int>(src_ids.size()); ++a) {
    for (int b = 0; b < static_cast<int>(snk_ids.size()); ++b) {
      if (x(a, b) != 0.0) {
        res.plan.matrix(src_ids[a], snk_ids[b]) = x(a, b);
        res.cost += x(a, b) * support.cost(src_ids[a], snk_ids[b]);
      }
    }
  }
  res.plan.source = mu.weights;
  res.plan.target = nu.weights;
  return res;
}

}  // namespace geosw::ot
