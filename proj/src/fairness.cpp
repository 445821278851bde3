#include "ufls/fairness.hpp"

#include <algorithm>

namespace ufls {

void FairnessSpec::validate() const {
  if (!(inflation_factor >= 1.0)) {
    throw InvalidInput("inflation factor must be >= 1");
  }
}

AllocationProblem apply_synthetic_uncertainty(const AllocationProblem& problem,
                                              const FairnessSpec& spec) {
  spec.validate();
  const Index m = problem.feeders.size();
  Vector scale = Vector::Ones(m);
  for (const int id : spec.target_feeder_ids) {
    scale[problem.feeders.index_of(id)] = spec.inflation_factor;
  }

  std::vector<Feeder> inflated = problem.feeders.feeders();
  for (Index i = 0; i < m; ++i) {
    inflated[static_cast<std::size_t>(i)].sigma *= scale[i];
  }
  return build_problem(FeederSet(std::move(inflated)),
                       problem.covariance.row_col_scaled(scale), problem.threshold,
                       problem.risk);
}

FairnessStudy fairness_study(const AllocationProblem& problem, const FairnessSpec& spec,
                             const SamplingSpec& sampling, const SolverConfig& config,
                             int n_threads) {
  const AllocationProblem adjusted_problem = apply_synthetic_uncertainty(problem, spec);

  FairnessStudy study;
  study.baseline_result = solve(problem, config);
  study.adjusted_result = solve(adjusted_problem, config);
  // Both selections face the same real uncertainty; only the optimizer saw
  // the inflated sigmas.
  study.baseline_report = validate(study.baseline_result, sampling, problem.threshold, n_threads);
  study.adjusted_report = validate(study.adjusted_result, sampling, problem.threshold, n_threads);

  std::vector<int> before = study.baseline_result.selected_ids(problem.feeders);
  std::vector<int> after = study.adjusted_result.selected_ids(problem.feeders);
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(study.added_ids));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(study.removed_ids));
  return study;
}

}  // namespace ufls
