#pragma once

#include <cstdint>
#include <vector>

#include "ufls/dist.hpp"
#include "ufls/model.hpp"
#include "ufls/solver.hpp"

namespace ufls {

/// How to sample the feeders' joint net-load: one marginal per feeder plus
/// the covariance tying them together.
struct SamplingSpec {
  std::vector<MarginalSpec> marginals;
  CovarianceMatrix covariance;
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;

  SamplingSpec(std::vector<MarginalSpec> marginals, CovarianceMatrix covariance,
               std::int64_t n_samples = 100000, std::uint64_t seed = 0);
};

/// Marginals of the given kind with each feeder's (mu, sigma).
SamplingSpec sampling_spec_for(const FeederSet& feeders, CovarianceMatrix covariance,
                               MarginalKind kind, double nu = 5.0,
                               std::int64_t n_samples = 100000, std::uint64_t seed = 0);

struct Histogram {
  Vector edges;                      // n_bins + 1 equal-width edges
  std::vector<std::int64_t> counts;  // one count per bin; sums to n_samples
};

/// Empirical performance of a selection under sampled net-loads: the share
/// of samples whose shed total falls below L, and the mean shed total.
struct ValidationReport {
  double violation_fraction = 0.0;
  double expected_disconnection_mw = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  Histogram histogram;
};

inline constexpr int kHistogramBins = 60;

/// m x n matrix of net-load draws. Gaussian marginals are correlated through
/// the covariance factor; non-Gaussian marginals through a Gaussian copula on
/// the correlation implied by the covariance. Diagonal covariance reduces to
/// independent inverse-CDF draws. Bit-identical output for any thread count.
Matrix draw_samples(const SamplingSpec& spec, int n_threads = 0);

/// Samples P~^T x and reports the violation fraction (P~^T x < L, strict)
/// and the expected disconnection (mean over all samples).
ValidationReport validate(const AllocationResult& result, const SamplingSpec& spec,
                          double threshold, int n_threads = 0);

struct CorrelationStudy {
  AllocationResult case1_result;  // optimized ignoring correlation
  ValidationReport case1_report;
  AllocationResult case2_result;  // optimized with the true covariance
  ValidationReport case2_report;
};

/// Case 1 optimizes with only the diagonal of the true covariance, Case 2
/// with the full matrix; both are validated by sampling from the true one.
CorrelationStudy correlation_study(const AllocationProblem& problem,
                                   const CovarianceMatrix& true_covariance,
                                   const SamplingSpec& sampling,
                                   const SolverConfig& config = {},
                                   int n_threads = 0);

}  // namespace ufls
