#pragma once

#include <vector>

#include "ufls/model.hpp"
#include "ufls/montecarlo.hpp"
#include "ufls/solver.hpp"

namespace ufls {

/// Synthetic-uncertainty transform: inflate the sigma of the designated
/// low-uncertainty feeders by a common factor >= 1 before solving, so the
/// optimizer stops over-picking them.
struct FairnessSpec {
  std::vector<int> target_feeder_ids;
  double inflation_factor = 1.0;

  void validate() const;
};

/// Returns the problem with each targeted feeder's sigma multiplied by the
/// factor and the covariance row/column scaled to match, which preserves
/// correlation coefficients and PSD-ness. Factor 1 is the identity.
AllocationProblem apply_synthetic_uncertainty(const AllocationProblem& problem,
                                              const FairnessSpec& spec);

struct FairnessStudy {
  AllocationResult baseline_result;
  ValidationReport baseline_report;
  AllocationResult adjusted_result;
  ValidationReport adjusted_report;
  std::vector<int> added_ids;    // selected only after inflation
  std::vector<int> removed_ids;  // selected only before inflation
};

/// Solves the original and inflated problems and validates both selections
/// against the original (true) covariance and marginals.
FairnessStudy fairness_study(const AllocationProblem& problem, const FairnessSpec& spec,
                             const SamplingSpec& sampling,
                             const SolverConfig& config = {}, int n_threads = 0);

}  // namespace ufls
