#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ufls/commands.hpp"
#include "ufls/types.hpp"

namespace {

using ufls::cli::RunConfig;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ufls::Method parse_method(const std::string& name) {
  if (name == "deterministic") return ufls::Method::Deterministic;
  if (name == "gaussian-cc") return ufls::Method::GaussianCC;
  return ufls::Method::DistributionallyRobustCC;
}

ufls::MarginalKind parse_distribution(const std::string& name) {
  if (name == "gaussian") return ufls::MarginalKind::Gaussian;
  if (name == "gumbel") return ufls::MarginalKind::Gumbel;
  if (name == "laplace") return ufls::MarginalKind::Laplace;
  return ufls::MarginalKind::StudentT;
}

ufls::RiskSpec make_risk(const std::string& method, std::optional<double> percentile,
                         std::optional<double> epsilon) {
  try {
    if (method == "deterministic") {
      if (!percentile) throw UsageError("--method deterministic requires --percentile");
      return ufls::RiskSpec::deterministic(*percentile);
    }
    if (!epsilon) throw UsageError("--method " + method + " requires --epsilon");
    return method == "gaussian-cc"
               ? ufls::RiskSpec::gaussian_cc(*epsilon)
               : ufls::RiskSpec::distributionally_robust_cc(*epsilon);
  } catch (const ufls::InvalidInput& e) {
    throw UsageError(e.what());  // bad flag values are usage, not data, errors
  }
}

// Flags shared by the sampling-based subcommands.
struct SamplingFlags {
  std::string distribution = "gaussian";
  double nu = 5.0;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;

  void wire(CLI::App* cmd) {
    cmd->add_option("--distribution", distribution, "Underlying net-load distribution")
        ->check(CLI::IsMember({"gaussian", "gumbel", "laplace", "student-t"}))
        ->envname("UFLS_DISTRIBUTION");
    cmd->add_option("--nu", nu, "Student-t degrees of freedom (> 2)")
        ->envname("UFLS_NU");
    cmd->add_option("--samples", samples, "Monte Carlo sample count")
        ->check(CLI::PositiveNumber)
        ->envname("UFLS_SAMPLES");
    cmd->add_option("--seed", seed, "Sampling seed")->envname("UFLS_SEED");
    cmd->add_option("--threads", threads, "Worker threads (0 = auto); output is identical for any value")
        ->envname("UFLS_THREADS");
  }

  void apply(RunConfig& config) const {
    config.distribution = parse_distribution(distribution);
    config.nu = nu;
    config.n_samples = samples;
    config.seed = seed;
    config.threads = threads;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-constrained allocation of under-frequency load shedding among feeders"};
  app.require_subcommand(1);

  std::string feeders_path;
  std::string covariance_path = "diagonal";
  std::string output_path;
  std::string result_path;
  std::string method;
  std::optional<double> percentile;
  std::optional<double> epsilon;
  double threshold = 0.0;
  std::uint64_t node_limit = 100'000'000;
  std::vector<double> sweep_params_percentile;
  std::vector<double> sweep_params_epsilon;
  std::vector<double> figure1_grid;
  std::vector<int> fairness_targets;
  std::vector<double> fairness_factors;
  SamplingFlags sampling;

  const auto add_feeders = [&](CLI::App* cmd) {
    cmd->add_option("--feeders", feeders_path, "Feeders CSV (feeder_id,mu_mw,sigma_mw)")
        ->required()
        ->envname("UFLS_FEEDERS");
  };
  const auto add_covariance = [&](CLI::App* cmd, bool require_file = false) {
    auto* opt = cmd->add_option("--covariance", covariance_path,
                                "Covariance CSV (MW^2) or 'diagonal'")
                    ->envname("UFLS_COVARIANCE");
    if (require_file) opt->required();
  };
  const auto add_threshold = [&](CLI::App* cmd) {
    cmd->add_option("--L", threshold, "Minimum load to shed (MW)")
        ->check(CLI::PositiveNumber)
        ->envname("UFLS_L");
  };
  const auto add_method = [&](CLI::App* cmd) {
    cmd->add_option("--method", method, "deterministic | gaussian-cc | dr-cc")
        ->required()
        ->check(CLI::IsMember({"deterministic", "gaussian-cc", "dr-cc"}))
        ->envname("UFLS_METHOD");
  };
  const auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--output", output_path, "Output file (default: stdout)")
        ->envname("UFLS_OUTPUT");
  };

  CLI::App* allocate = app.add_subcommand("allocate", "Solve one allocation problem");
  add_feeders(allocate);
  add_covariance(allocate);
  add_threshold(allocate);
  allocate->get_option("--L")->required();
  add_method(allocate);
  allocate->add_option("--percentile", percentile, "Deterministic net-load percentile in (0,1)")
      ->envname("UFLS_PERCENTILE");
  allocate->add_option("--epsilon", epsilon, "Accepted violation probability in (0,0.5)")
      ->envname("UFLS_EPSILON");
  allocate->add_option("--node-limit", node_limit, "Branch-and-bound node budget")
      ->check(CLI::PositiveNumber)
      ->envname("UFLS_NODE_LIMIT");
  add_output(allocate);

  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo validation of a result file");
  add_feeders(validate);
  add_covariance(validate);
  add_threshold(validate);
  validate->add_option("--result", result_path, "Result document from 'allocate'")
      ->required()
      ->envname("UFLS_RESULT");
  sampling.wire(validate);
  add_output(validate);

  CLI::App* sweep = app.add_subcommand("sweep", "One row of metrics per percentile or epsilon");
  add_feeders(sweep);
  add_covariance(sweep);
  add_threshold(sweep);
  sweep->get_option("--L")->required();
  add_method(sweep);
  sweep->add_option("--percentile", sweep_params_percentile, "Percentiles to sweep")
      ->envname("UFLS_PERCENTILE");
  sweep->add_option("--epsilon", sweep_params_epsilon, "Epsilons to sweep")
      ->envname("UFLS_EPSILON");
  sampling.wire(sweep);
  add_output(sweep);

  CLI::App* figure1 = app.add_subcommand(
      "figure1", "Safety-factor curves: epsilon vs Phi^-1(1-eps) and sqrt((1-eps)/eps)");
  figure1->add_option("--epsilon", figure1_grid,
                      "Grid points in (0, 0.5); default is 500 points over (0.001, 0.499)")
      ->envname("UFLS_EPSILON");
  add_output(figure1);

  CLI::App* fairness = app.add_subcommand("fairness", "Synthetic-uncertainty fairness study");
  add_feeders(fairness);
  add_covariance(fairness);
  add_threshold(fairness);
  fairness->get_option("--L")->required();
  add_method(fairness);
  fairness->add_option("--percentile", percentile, "Deterministic net-load percentile in (0,1)")
      ->envname("UFLS_PERCENTILE");
  fairness->add_option("--epsilon", epsilon, "Accepted violation probability in (0,0.5)")
      ->envname("UFLS_EPSILON");
  fairness->add_option("--fairness-targets", fairness_targets, "Feeder ids to inflate")
      ->required()
      ->envname("UFLS_FAIRNESS_TARGETS");
  fairness->add_option("--factors", fairness_factors, "Sigma inflation factors (>= 1)")
      ->required()
      ->check(CLI::Range(1.0, 1e6))
      ->envname("UFLS_FACTORS");
  sampling.wire(fairness);
  add_output(fairness);

  CLI::App* correlation = app.add_subcommand(
      "correlation-study", "Optimize with and without correlation, validate against the true covariance");
  add_feeders(correlation);
  add_covariance(correlation, /*require_file=*/true);
  add_threshold(correlation);
  correlation->get_option("--L")->required();
  add_method(correlation);
  correlation->add_option("--epsilon", epsilon, "Accepted violation probability in (0,0.5)")
      ->envname("UFLS_EPSILON");
  correlation->add_option("--percentile", percentile, "Deterministic net-load percentile in (0,1)")
      ->envname("UFLS_PERCENTILE");
  sampling.wire(correlation);
  add_output(correlation);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ufls::cli::kExitUsage;
  }

  try {
    RunConfig config;
    config.feeders_path = feeders_path;
    config.covariance_path = covariance_path;
    config.threshold_mw = threshold;
    config.output_path = output_path;
    config.node_limit = node_limit;
    sampling.apply(config);

    if (*allocate) {
      config.risk = make_risk(method, percentile, epsilon);
      return ufls::cli::cmd_allocate(config);
    }
    if (*validate) {
      return ufls::cli::cmd_validate(config, result_path);
    }
    if (*sweep) {
      config.risk.method = parse_method(method);
      const bool deterministic = config.risk.method == ufls::Method::Deterministic;
      const std::vector<double>& params =
          deterministic ? sweep_params_percentile : sweep_params_epsilon;
      if (deterministic && !sweep_params_epsilon.empty()) {
        throw UsageError("deterministic sweep takes --percentile values, not --epsilon");
      }
      if (!deterministic && !sweep_params_percentile.empty()) {
        throw UsageError("chance-constrained sweep takes --epsilon values, not --percentile");
      }
      for (const double p : params) {
        // Range-check up front so a bad flag is a usage error.
        make_risk(method, p, p);
      }
      return ufls::cli::cmd_sweep(config, params);
    }
    if (*figure1) {
      for (const double eps : figure1_grid) {
        if (!(eps > 0.0 && eps < 0.5)) {
          throw UsageError("figure1 epsilon grid must lie in (0, 0.5)");
        }
      }
      return ufls::cli::cmd_figure1(config, figure1_grid);
    }
    if (*fairness) {
      config.risk = make_risk(method, percentile, epsilon);
      return ufls::cli::cmd_fairness(config, fairness_targets, fairness_factors);
    }
    if (*correlation) {
      config.risk = make_risk(method, percentile, epsilon);
      return ufls::cli::cmd_correlation_study(config);
    }
    return ufls::cli::kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ufls::cli::kExitUsage;
  } catch (const ufls::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return ufls::cli::kExitInfeasible;
  } catch (const ufls::NodeLimitError& e) {
    std::cerr << "node limit: " << e.what() << "\n";
    return ufls::cli::kExitNodeLimit;
  } catch (const ufls::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ufls::cli::kExitDataFormat;
  } catch (const ufls::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ufls::cli::kExitDataFormat;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
}
