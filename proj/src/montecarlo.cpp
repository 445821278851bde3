#include "ufls/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "ufls/rng.hpp"

namespace ufls {

namespace {

int resolve_threads(int n_threads) {
  if (n_threads > 0) return n_threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 8u));
}

// Runs fn(begin, end) over contiguous column ranges. Workers own disjoint
// ranges, so the result does not depend on the thread count.
template <typename Fn>
void parallel_columns(Index n, int n_threads, const Fn& fn) {
  const int workers = std::min<Index>(resolve_threads(n_threads), std::max<Index>(n, 1));
  if (workers <= 1) {
    fn(Index{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

// Sum with Neumaier compensation; worker counts never reorder it because the
// reduction always runs serially over sample index.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Matrix correlation_from_covariance(const Matrix& sigma) {
  const Index m = sigma.rows();
  Vector stddev = sigma.diagonal().cwiseMax(0.0).cwiseSqrt();
  Matrix corr = Matrix::Identity(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double denom = stddev[i] * stddev[j];
      corr(i, j) = denom > 0.0 ? sigma(i, j) / denom : 0.0;
    }
  }
  return corr;
}

// Keeps copula uniforms strictly inside the quantiles' domain.
double clamp_unit(double u) {
  constexpr double lo = 1e-300;
  constexpr double hi = 1.0 - 1e-16;
  return std::min(std::max(u, lo), hi);
}

}  // namespace

SamplingSpec::SamplingSpec(std::vector<MarginalSpec> marginals_in,
                           CovarianceMatrix covariance_in, std::int64_t n_samples_in,
                           std::uint64_t seed_in)
    : marginals(std::move(marginals_in)),
      covariance(std::move(covariance_in)),
      n_samples(n_samples_in),
      seed(seed_in) {
  if (static_cast<Index>(marginals.size()) != covariance.dimension()) {
    throw InvalidInput("one marginal per covariance row is required");
  }
  if (n_samples < 1) {
    throw InvalidInput("n_samples must be >= 1");
  }
  for (const MarginalSpec& m : marginals) m.validate();
}

SamplingSpec sampling_spec_for(const FeederSet& feeders, CovarianceMatrix covariance,
                               MarginalKind kind, double nu, std::int64_t n_samples,
                               std::uint64_t seed) {
  std::vector<MarginalSpec> marginals;
  marginals.reserve(static_cast<std::size_t>(feeders.size()));
  for (const Feeder& f : feeders.feeders()) {
    marginals.push_back(MarginalSpec{kind, f.mu, f.sigma, nu});
  }
  return SamplingSpec(std::move(marginals), std::move(covariance), n_samples, seed);
}

Matrix draw_samples(const SamplingSpec& spec, int n_threads) {
  const Index m = spec.covariance.dimension();
  const Index n = static_cast<Index>(spec.n_samples);

  for (Index i = 0; i < m; ++i) {
    const double s_marginal = spec.marginals[static_cast<std::size_t>(i)].sigma;
    const double s_cov = std::sqrt(std::max(0.0, spec.covariance.entries()(i, i)));
    const double denom = std::max(s_marginal, s_cov);
    if (denom > 0.0 && std::fabs(s_marginal - s_cov) > 1e-6 * denom) {
      throw InvalidInput("marginal sigma disagrees with the covariance diagonal at index " +
                         std::to_string(i));
    }
  }

  Matrix samples(m, n);
  const std::uint64_t seed = spec.seed;
  const auto counter = [m](Index i, Index j) {
    return static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(m) +
           static_cast<std::uint64_t>(i);
  };

  if (spec.covariance.mode() == CovarianceMatrix::Mode::Diagonal) {
    // Independent inverse-CDF draws.
    parallel_columns(n, n_threads, [&](Index begin, Index end) {
      for (Index j = begin; j < end; ++j) {
        for (Index i = 0; i < m; ++i) {
          samples(i, j) = sample(spec.marginals[static_cast<std::size_t>(i)],
                                 rng::uniform_open(seed, counter(i, j)));
        }
      }
    });
    return samples;
  }

  const bool all_gaussian =
      std::all_of(spec.marginals.begin(), spec.marginals.end(),
                  [](const MarginalSpec& s) { return s.kind == MarginalKind::Gaussian; });

  if (all_gaussian) {
    const Matrix& factor = spec.covariance.factor();
    parallel_columns(n, n_threads, [&](Index begin, Index end) {
      Vector z(m);
      for (Index j = begin; j < end; ++j) {
        for (Index i = 0; i < m; ++i) {
          z[i] = inverse_normal_cdf(rng::uniform_open(seed, counter(i, j)));
        }
        for (Index i = 0; i < m; ++i) {
          samples(i, j) = spec.marginals[static_cast<std::size_t>(i)].mu +
                          factor.row(i).dot(z);
        }
      }
    });
    return samples;
  }

  // Gaussian copula: correlate standard normals with the correlation implied
  // by the covariance, map through Phi to uniforms, then through each
  // marginal's inverse CDF. Marginals are preserved exactly.
  const Matrix copula_factor = psd_factor(correlation_from_covariance(spec.covariance.entries()));
  parallel_columns(n, n_threads, [&](Index begin, Index end) {
    Vector z(m);
    for (Index j = begin; j < end; ++j) {
      for (Index i = 0; i < m; ++i) {
        z[i] = inverse_normal_cdf(rng::uniform_open(seed, counter(i, j)));
      }
      for (Index i = 0; i < m; ++i) {
        const double u = clamp_unit(normal_cdf(copula_factor.row(i).dot(z)));
        samples(i, j) = sample(spec.marginals[static_cast<std::size_t>(i)], u);
      }
    }
  });
  return samples;
}

ValidationReport validate(const AllocationResult& result, const SamplingSpec& spec,
                          double threshold, int n_threads) {
  const Index m = spec.covariance.dimension();
  if (result.selection.size() != m) {
    throw InvalidInput("selection length does not match the sampling dimension");
  }
  const Matrix samples = draw_samples(spec, n_threads);
  const Index n = samples.cols();

  Vector totals(n);
  parallel_columns(n, n_threads, [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j) {
      double t = 0.0;
      for (Index i = 0; i < m; ++i) {
        if (result.selection[i] != 0) t += samples(i, j);
      }
      totals[j] = t;
    }
  });

  ValidationReport report;
  report.n_samples = spec.n_samples;
  report.seed = spec.seed;

  std::int64_t violations = 0;
  CompensatedSum mean_sum;
  double lo = totals[0];
  double hi = totals[0];
  for (Index j = 0; j < n; ++j) {
    const double t = totals[j];
    if (t < threshold) ++violations;
    mean_sum.add(t);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  report.violation_fraction = static_cast<double>(violations) / static_cast<double>(n);
  report.expected_disconnection_mw = mean_sum.value() / static_cast<double>(n);

  Histogram& hist = report.histogram;
  hist.edges.resize(kHistogramBins + 1);
  hist.counts.assign(kHistogramBins, 0);
  const double width = (hi - lo) / kHistogramBins;
  for (int b = 0; b <= kHistogramBins; ++b) {
    hist.edges[b] = lo + width * b;
  }
  hist.edges[kHistogramBins] = hi;
  for (Index j = 0; j < n; ++j) {
    Index b = width > 0.0 ? static_cast<Index>((totals[j] - lo) / width) : 0;
    b = std::min<Index>(std::max<Index>(b, 0), kHistogramBins - 1);
    ++hist.counts[static_cast<std::size_t>(b)];
  }
  return report;
}

CorrelationStudy correlation_study(const AllocationProblem& problem,
                                   const CovarianceMatrix& true_covariance,
                                   const SamplingSpec& sampling,
                                   const SolverConfig& config, int n_threads) {
  if (true_covariance.dimension() != problem.feeders.size()) {
    throw InvalidInput("true covariance dimension does not match the problem");
  }
  const AllocationProblem ignoring = build_problem(
      problem.feeders,
      CovarianceMatrix::diagonal(Vector(true_covariance.entries().diagonal())),
      problem.threshold, problem.risk);
  const AllocationProblem considering =
      build_problem(problem.feeders, true_covariance, problem.threshold, problem.risk);

  // Both cases are judged against reality: samples always carry the true
  // correlation structure.
  const SamplingSpec true_sampling(sampling.marginals, true_covariance,
                                   sampling.n_samples, sampling.seed);

  CorrelationStudy study{solve(ignoring, config), {}, solve(considering, config), {}};
  study.case1_report = validate(study.case1_result, true_sampling, problem.threshold, n_threads);
  study.case2_report = validate(study.case2_result, true_sampling, problem.threshold, n_threads);
  return study;
}

}  // namespace ufls
