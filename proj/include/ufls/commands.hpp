#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ufls/model.hpp"
#include "ufls/montecarlo.hpp"

namespace ufls::cli {

/// Everything a subcommand needs; filled from flags and UFLS_* environment
/// overrides by the front-end.
struct RunConfig {
  std::string feeders_path;
  std::string covariance_path = "diagonal";
  double threshold_mw = 0.0;  // 0 = take it from the result file (validate only)
  RiskSpec risk;
  MarginalKind distribution = MarginalKind::Gaussian;
  double nu = 5.0;
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = auto
  std::uint64_t node_limit = 100'000'000;
  std::string output_path;  // empty = stdout
};

// Exit codes shared with the front-end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNodeLimit = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataFormat = 65;

int cmd_allocate(const RunConfig& config);
int cmd_validate(const RunConfig& config, const std::string& result_path);
/// Deterministic method sweeps percentiles; CC methods sweep epsilons.
int cmd_sweep(const RunConfig& config, const std::vector<double>& parameters);
/// Empty grid emits the default 500-point grid over (0.001, 0.499).
int cmd_figure1(const RunConfig& config, std::vector<double> epsilon_grid);
int cmd_fairness(const RunConfig& config, const std::vector<int>& target_ids,
                 const std::vector<double>& factors);
int cmd_correlation_study(const RunConfig& config);

}  // namespace ufls::cli
