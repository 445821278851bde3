#pragma once

#include <cstdint>
#include <vector>

#include "ufls/constraint.hpp"
#include "ufls/model.hpp"

namespace ufls {

struct SolverConfig {
  std::uint64_t node_limit = 100'000'000;
  bool allow_bnb_pruning = true;
};

/// Exact minimization of coeffs^T x over binary selections subject to the
/// method's constraint, by best-first branch-and-bound. Among equal-objective
/// optima the selection whose index set is lexicographically smallest wins.
/// Throws InfeasibleError when no selection is feasible. When the node limit
/// is hit, returns the incumbent with proven_optimal = false, or throws
/// NodeLimitError if none was found yet.
AllocationResult solve(const AllocationProblem& problem,
                       const SolverConfig& config = {});

/// Enumerates all 2^m selections (m <= 25); the testing oracle for solve().
AllocationResult solve_bruteforce(const AllocationProblem& problem);

/// One solve per epsilon, method and everything else unchanged. Requires a
/// chance-constrained method; objectives are non-increasing in epsilon.
std::vector<AllocationResult> sweep_epsilon(const AllocationProblem& problem,
                                            const std::vector<double>& epsilons,
                                            const SolverConfig& config = {});

}  // namespace ufls
