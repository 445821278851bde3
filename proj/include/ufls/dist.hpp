#pragma once

#include "ufls/types.hpp"

namespace ufls {

/// Standard normal CDF.
double normal_cdf(double x);

/// Phi^-1(p) for p in (0, 1); absolute error <= 1e-9 over [1e-12, 1 - 1e-12].
/// Rational initial guess refined by a Halley step against erfc.
double inverse_normal_cdf(double p);

/// Cantelli one-sided lower bound on the CDF at lambda >= 0: lambda^2 / (1 + lambda^2).
double cantelli_lower_bound(double lambda);

/// Inverse of cantelli_lower_bound: sqrt(p / (1 - p)) for p in [0, 1).
double cantelli_inverse(double p);

enum class MarginalKind { Gaussian, Gumbel, Laplace, StudentT };

/// One feeder's net-load marginal, parameterized by its first two moments.
/// The Gumbel is the minimum-type (left-skewed) variant; StudentT carries
/// nu > 2 degrees of freedom so the variance exists.
struct MarginalSpec {
  MarginalKind kind = MarginalKind::Gaussian;
  double mu = 0.0;
  double sigma = 0.0;
  double nu = 5.0;  // StudentT only

  void validate() const;
};

struct LocationScale {
  double location = 0.0;
  double scale = 0.0;
};

/// Location/scale parameters reproducing (mu, sigma) exactly:
///   Gaussian   alpha = mu,                beta = sigma
///   Gumbel     alpha = mu + beta*gamma,   beta = sqrt(6)/pi * sigma   (minimum-type)
///   Laplace    alpha = mu,                beta = sigma / sqrt(2)
///   StudentT   location = mu,             scale = sigma * sqrt((nu-2)/nu)
LocationScale moment_matched_params(const MarginalSpec& spec);

/// Inverse-CDF transform of a uniform(0,1) variate; a pure function of
/// (spec, u).
double sample(const MarginalSpec& spec, double u);

const char* marginal_kind_name(MarginalKind kind);

namespace detail {
/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
/// Student's t CDF with nu degrees of freedom.
double student_t_cdf(double x, double nu);
/// Student's t quantile (standard, location 0 / scale 1).
double student_t_quantile(double p, double nu);
}  // namespace detail

}  // namespace ufls
