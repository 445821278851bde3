#include "ufls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <utility>

namespace ufls {

namespace {

constexpr double kFeasibilityTol = 1e-9;   // slack >= -tol counts as feasible
constexpr double kPruneSlackTol = 1e-6;    // margin left on optimistic prunes

double tie_eps(double objective) { return 1e-9 * (1.0 + std::fabs(objective)); }

// {0,2} < {1,2}; {0} < {0,2}. Shorter set wins on a common prefix.
bool lex_smaller(const Selection& a, const Selection& b) {
  for (Index i = 0; i < a.size(); ++i) {
    const bool ia = a[i] != 0;
    const bool ib = b[i] != 0;
    if (ia != ib) return ia;  // smaller first differing index is selected in a
  }
  return false;
}

struct Incumbent {
  bool found = false;
  Selection selection;
  double objective = 0.0;
  ReliabilityMargin margin;

  // Strictly better objective, or equal objective and lexicographically
  // smaller index set.
  void offer(const Selection& sel, double obj, const ReliabilityMargin& m) {
    if (!found || obj < objective ||
        (obj == objective && lex_smaller(sel, selection))) {
      found = true;
      selection = sel;
      objective = obj;
      margin = m;
    }
  }
};

AllocationResult make_result(const AllocationProblem& problem, const Incumbent& inc,
                             std::uint64_t nodes, bool proven) {
  AllocationResult result;
  result.selection = inc.selection;
  result.objective_mw = inc.objective;
  result.margin = inc.margin;
  result.method_echo = problem.risk;
  result.solver_stats = {nodes, proven};
  return result;
}

struct Node {
  double lower_bound = 0.0;
  double sum = 0.0;   // committed objective mass, in branch order
  double quad = 0.0;  // committed x^T Sigma x
  int depth = 0;
  std::uint64_t id = 0;
  std::vector<std::uint8_t> decisions;  // along branch order
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const AllocationProblem& problem, const SolverConfig& config)
      : problem_(problem),
        config_(config),
        form_(build_constraint(problem)),
        m_(problem.feeders.size()) {
    // Branch on feeders in descending objective-coefficient order so that
    // high-value commitments happen near the root.
    order_.resize(static_cast<std::size_t>(m_));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) {
      return form_.objective_coeffs[a] > form_.objective_coeffs[b];
    });

    pos_suffix_.assign(static_cast<std::size_t>(m_) + 1, 0.0);
    neg_suffix_.assign(static_cast<std::size_t>(m_) + 1, 0.0);
    for (Index d = m_ - 1; d >= 0; --d) {
      const double c = form_.objective_coeffs[order_[static_cast<std::size_t>(d)]];
      pos_suffix_[static_cast<std::size_t>(d)] =
          pos_suffix_[static_cast<std::size_t>(d) + 1] + std::max(0.0, c);
      neg_suffix_[static_cast<std::size_t>(d)] =
          neg_suffix_[static_cast<std::size_t>(d) + 1] + std::min(0.0, c);
    }
    // The optimistic-variance prune assumes adding a feeder cannot decrease
    // x^T Sigma x, which needs an entrywise nonnegative Sigma.
    variance_prune_ok_ = config_.allow_bnb_pruning &&
                         problem_.covariance.entrywise_nonnegative();
  }

  AllocationResult run() {
    std::priority_queue<Node, std::vector<Node>, NodeWorse> frontier;
    Node root;
    root.lower_bound = std::max(objective_floor(0.0), neg_suffix_[0]);
    frontier.push(std::move(root));
    std::uint64_t next_id = 1;
    std::uint64_t popped = 0;

    while (!frontier.empty()) {
      if (popped >= config_.node_limit) {
        if (incumbent_.found) return make_result(problem_, incumbent_, popped, false);
        throw NodeLimitError("node limit reached before any feasible selection was found");
      }
      Node node = frontier.top();
      frontier.pop();
      ++popped;

      if (config_.allow_bnb_pruning && incumbent_.found &&
          node.lower_bound > incumbent_.objective + tie_eps(incumbent_.objective)) {
        // Best-first order: everything still queued is at least as bad.
        break;
      }
      if (node.depth == static_cast<int>(m_)) {
        evaluate_leaf(node);
        continue;
      }

      const Index feeder = order_[static_cast<std::size_t>(node.depth)];
      for (const std::uint8_t take : {std::uint8_t{1}, std::uint8_t{0}}) {
        Node child;
        child.depth = node.depth + 1;
        child.decisions = node.decisions;
        child.decisions.push_back(take);
        child.sum = node.sum;
        child.quad = node.quad;
        if (take) {
          child.sum += form_.objective_coeffs[feeder];
          child.quad += committed_cross(node.decisions, feeder);
        }
        if (!admit(child)) continue;
        child.id = next_id++;
        frontier.push(std::move(child));
      }
    }

    if (!incumbent_.found) {
      throw InfeasibleError("no selection satisfies the shedding constraint");
    }
    return make_result(problem_, incumbent_, popped, true);
  }

 private:
  // Sigma[f][f] + 2 * sum over committed i of Sigma[i][f].
  double committed_cross(const std::vector<std::uint8_t>& decisions, Index feeder) const {
    const Matrix& sigma = problem_.covariance.entries();
    double cross = sigma(feeder, feeder);
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      if (decisions[d]) cross += 2.0 * sigma(order_[d], feeder);
    }
    return cross;
  }

  // Objective of any feasible completion is at least L + k * sigma_delta,
  // and sigma_delta cannot shrink below the committed level when Sigma is
  // entrywise nonnegative.
  double objective_floor(double quad) const {
    double floor = form_.threshold - kFeasibilityTol;
    if (variance_prune_ok_) {
      floor += form_.safety_factor_k * std::sqrt(std::max(0.0, quad));
    }
    return floor;
  }

  bool admit(Node& child) {
    const auto d = static_cast<std::size_t>(child.depth);
    if (variance_prune_ok_) {
      const double optimistic_slack = (child.sum + pos_suffix_[d]) - form_.threshold -
                                      form_.safety_factor_k *
                                          std::sqrt(std::max(0.0, child.quad));
      if (optimistic_slack < -kPruneSlackTol) return false;
    }
    child.lower_bound =
        std::max(objective_floor(child.quad), child.sum + neg_suffix_[d]);
    if (config_.allow_bnb_pruning && incumbent_.found &&
        child.lower_bound > incumbent_.objective + tie_eps(incumbent_.objective)) {
      return false;
    }
    return true;
  }

  void evaluate_leaf(const Node& node) {
    Selection sel = Selection::Zero(m_);
    for (std::size_t d = 0; d < node.decisions.size(); ++d) {
      if (node.decisions[d]) sel[order_[d]] = 1;
    }
    const ReliabilityMargin margin =
        evaluate_margin(form_, problem_.covariance, sel);
    if (!margin.feasible(kFeasibilityTol)) return;
    incumbent_.offer(sel, canonical_objective(form_.objective_coeffs, sel), margin);
  }

  const AllocationProblem& problem_;
  SolverConfig config_;
  ConstraintForm form_;
  Index m_;
  std::vector<Index> order_;
  std::vector<double> pos_suffix_;
  std::vector<double> neg_suffix_;
  bool variance_prune_ok_ = false;
  Incumbent incumbent_;
};

}  // namespace

AllocationResult solve(const AllocationProblem& problem, const SolverConfig& config) {
  if (config.node_limit == 0) {
    throw InvalidInput("node limit must be > 0");
  }
  return BranchAndBound(problem, config).run();
}

AllocationResult solve_bruteforce(const AllocationProblem& problem) {
  const Index m = problem.feeders.size();
  if (m > 25) {
    throw InvalidInput("brute-force enumeration is limited to m <= 25 feeders");
  }
  const ConstraintForm form = build_constraint(problem);

  Incumbent incumbent;
  Selection sel = Selection::Zero(m);
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (Index i = 0; i < m; ++i) sel[i] = static_cast<int>((bits >> i) & 1u);
    const ReliabilityMargin margin =
        evaluate_margin(form, problem.covariance, sel);
    if (!margin.feasible(kFeasibilityTol)) continue;
    incumbent.offer(sel, canonical_objective(form.objective_coeffs, sel), margin);
  }
  if (!incumbent.found) {
    throw InfeasibleError("no selection satisfies the shedding constraint");
  }
  return make_result(problem, incumbent, total, true);
}

std::vector<AllocationResult> sweep_epsilon(const AllocationProblem& problem,
                                            const std::vector<double>& epsilons,
                                            const SolverConfig& config) {
  if (problem.risk.method == Method::Deterministic) {
    throw InvalidInput("epsilon sweep requires a chance-constrained method");
  }
  std::vector<AllocationResult> results;
  results.reserve(epsilons.size());
  for (const double eps : epsilons) {
    AllocationProblem p{problem.feeders, problem.covariance, problem.threshold,
                        problem.risk};
    p.risk.epsilon = eps;
    p.risk.validate();
    results.push_back(solve(p, config));
  }
  return results;
}

}  // namespace ufls
