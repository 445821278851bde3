#include "ufls/commands.hpp"

#include <fstream>
#include <iostream>

#include "ufls/fairness.hpp"
#include "ufls/io.hpp"
#include "ufls/solver.hpp"

namespace ufls::cli {

namespace {

CovarianceMatrix load_covariance(const RunConfig& config, const FeederSet& feeders) {
  if (config.covariance_path == "diagonal") {
    return CovarianceMatrix::diagonal(feeders);
  }
  Matrix entries = io::read_covariance_file(config.covariance_path);
  if (entries.rows() != feeders.size()) {
    throw InvalidInput("covariance is " + std::to_string(entries.rows()) + "x" +
                       std::to_string(entries.cols()) + " but the feeder file has " +
                       std::to_string(feeders.size()) + " feeders");
  }
  return CovarianceMatrix::full(entries);
}

template <typename Fn>
void with_output(const std::string& path, const Fn& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file '" + path + "'");
  fn(out);
}

SolverConfig solver_config(const RunConfig& config) {
  SolverConfig sc;
  sc.node_limit = config.node_limit;
  return sc;
}

}  // namespace

int cmd_allocate(const RunConfig& config) {
  FeederSet feeders = io::read_feeders_file(config.feeders_path);
  CovarianceMatrix covariance = load_covariance(config, feeders);
  const AllocationProblem problem = build_problem(
      std::move(feeders), std::move(covariance), config.threshold_mw, config.risk);
  const AllocationResult result = solve(problem, solver_config(config));
  with_output(config.output_path, [&](std::ostream& out) {
    io::write_result(out, result, problem.feeders, problem.threshold);
  });
  return result.solver_stats.proven_optimal ? kExitOk : kExitNodeLimit;
}

int cmd_validate(const RunConfig& config, const std::string& result_path) {
  FeederSet feeders = io::read_feeders_file(config.feeders_path);
  CovarianceMatrix covariance = load_covariance(config, feeders);

  std::ifstream rin(result_path);
  if (!rin) throw ParseError("cannot open result file '" + result_path + "'");
  double file_threshold = 0.0;
  const AllocationResult result = io::read_result(rin, result_path, feeders, &file_threshold);
  const double threshold = config.threshold_mw > 0.0 ? config.threshold_mw : file_threshold;

  const SamplingSpec spec =
      sampling_spec_for(feeders, std::move(covariance), config.distribution, config.nu,
                        config.n_samples, config.seed);
  const ValidationReport report = validate(result, spec, threshold, config.threads);
  with_output(config.output_path, [&](std::ostream& out) {
    io::write_report(out, report, config.distribution, config.nu, threshold);
  });
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, const std::vector<double>& parameters) {
  FeederSet feeders = io::read_feeders_file(config.feeders_path);
  CovarianceMatrix covariance = load_covariance(config, feeders);
  const SamplingSpec spec = sampling_spec_for(feeders, covariance, config.distribution,
                                              config.nu, config.n_samples, config.seed);

  std::vector<io::SweepRow> rows;
  rows.reserve(parameters.size());
  const bool deterministic = config.risk.method == Method::Deterministic;
  if (deterministic) {
    for (const double p : parameters) {
      const AllocationProblem problem = build_problem(
          feeders, covariance, config.threshold_mw, RiskSpec::deterministic(p));
      const AllocationResult result = solve(problem, solver_config(config));
      const ValidationReport report =
          validate(result, spec, config.threshold_mw, config.threads);
      rows.push_back({p, result.objective_mw, report.violation_fraction,
                      report.expected_disconnection_mw});
    }
  } else if (!parameters.empty()) {
    RiskSpec risk = config.risk;
    risk.epsilon = parameters.front();
    const AllocationProblem problem =
        build_problem(feeders, covariance, config.threshold_mw, risk);
    const std::vector<AllocationResult> results =
        sweep_epsilon(problem, parameters, solver_config(config));
    for (std::size_t i = 0; i < results.size(); ++i) {
      const ValidationReport report =
          validate(results[i], spec, config.threshold_mw, config.threads);
      rows.push_back({parameters[i], results[i].objective_mw,
                      report.violation_fraction, report.expected_disconnection_mw});
    }
  }
  with_output(config.output_path, [&](std::ostream& out) {
    io::write_sweep(out, deterministic ? "percentile_fraction" : "epsilon_fraction", rows);
  });
  return kExitOk;
}

int cmd_figure1(const RunConfig& config, std::vector<double> epsilon_grid) {
  if (epsilon_grid.empty()) {
    constexpr int kPoints = 500;
    constexpr double lo = 0.001;
    constexpr double hi = 0.499;
    epsilon_grid.reserve(kPoints);
    for (int i = 0; i < kPoints; ++i) {
      epsilon_grid.push_back(lo + (hi - lo) * i / (kPoints - 1));
    }
  }
  with_output(config.output_path,
              [&](std::ostream& out) { io::write_figure1(out, epsilon_grid); });
  return kExitOk;
}

int cmd_fairness(const RunConfig& config, const std::vector<int>& target_ids,
                 const std::vector<double>& factors) {
  FeederSet feeders = io::read_feeders_file(config.feeders_path);
  CovarianceMatrix covariance = load_covariance(config, feeders);
  const AllocationProblem problem =
      build_problem(feeders, covariance, config.threshold_mw, config.risk);
  const SamplingSpec spec = sampling_spec_for(problem.feeders, problem.covariance,
                                              config.distribution, config.nu,
                                              config.n_samples, config.seed);

  std::vector<io::FairnessRow> rows;
  rows.reserve(factors.size());
  for (const double factor : factors) {
    FairnessSpec fs{target_ids, factor};
    rows.push_back(
        {factor, fairness_study(problem, fs, spec, solver_config(config), config.threads)});
  }
  with_output(config.output_path, [&](std::ostream& out) {
    io::write_fairness(out, rows, problem.feeders, problem.risk, problem.threshold);
  });
  return kExitOk;
}

int cmd_correlation_study(const RunConfig& config) {
  if (config.covariance_path == "diagonal") {
    throw InvalidInput("correlation-study requires a covariance file, not 'diagonal'");
  }
  FeederSet feeders = io::read_feeders_file(config.feeders_path);
  CovarianceMatrix true_covariance = load_covariance(config, feeders);
  const AllocationProblem problem =
      build_problem(feeders, true_covariance, config.threshold_mw, config.risk);
  const SamplingSpec spec = sampling_spec_for(problem.feeders, problem.covariance,
                                              config.distribution, config.nu,
                                              config.n_samples, config.seed);
  const CorrelationStudy study = correlation_study(problem, problem.covariance, spec,
                                                   solver_config(config), config.threads);
  with_output(config.output_path, [&](std::ostream& out) {
    io::write_correlation_study(out, study, problem.feeders, problem.risk,
                                problem.threshold);
  });
  return kExitOk;
}

}  // namespace ufls::cli
