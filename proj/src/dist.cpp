#include "ufls/dist.hpp"

#include <cmath>
#include <limits>

namespace ufls {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

// Acklam's rational approximation to Phi^-1 on (0, 0.5]; relative error
// below 1.15e-9 before refinement.
double acklam_guess(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// One Halley step of Phi(x) = p using the erfc-based CDF. Past |x| ~ 37 the
// exp() overflows and erfc underflows, so the rational guess stands as-is.
double halley_refine(double x, double p) {
  if (std::fabs(x) > 37.0) return x;
  const double err = normal_cdf(x) - p;
  const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("inverse_normal_cdf: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  // Work in the lower half; 1 - p is exact for p in [0.5, 1].
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
  double x = acklam_guess(p);
  x = halley_refine(x, p);
  x = halley_refine(x, p);
  return x;
}

double cantelli_lower_bound(double lambda) {
  if (!(lambda >= 0.0)) {
    throw InvalidInput("cantelli_lower_bound: lambda must be >= 0");
  }
  return lambda * lambda / (1.0 + lambda * lambda);
}

double cantelli_inverse(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InvalidInput("cantelli_inverse: p must lie in [0, 1)");
  }
  return std::sqrt(p / (1.0 - p));
}

void MarginalSpec::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
    throw InvalidInput("marginal: sigma must be finite and >= 0, mu finite");
  }
  if (sigma == 0.0 && kind != MarginalKind::Gaussian) {
    throw InvalidInput("marginal: sigma = 0 is only representable as a Gaussian point mass");
  }
  if (kind == MarginalKind::StudentT && !(nu > 2.0)) {
    throw InvalidInput("student-t marginal requires nu > 2 so the variance exists");
  }
}

LocationScale moment_matched_params(const MarginalSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case MarginalKind::Gaussian:
      return {spec.mu, spec.sigma};
    case MarginalKind::Gumbel: {
      // Minimum-type Gumbel: mean = alpha - beta * gamma, so matching the
      // mean puts the location above mu.
      const double beta = std::sqrt(6.0) / M_PI * spec.sigma;
      return {spec.mu + beta * kEulerMascheroni, beta};
    }
    case MarginalKind::Laplace:
      return {spec.mu, spec.sigma / kSqrt2};
    case MarginalKind::StudentT:
      return {spec.mu, spec.sigma * std::sqrt((spec.nu - 2.0) / spec.nu)};
  }
  throw InvalidInput("unknown marginal kind");
}

double sample(const MarginalSpec& spec, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw InvalidInput("sample: u must lie in (0, 1)");
  }
  const LocationScale ps = moment_matched_params(spec);
  switch (spec.kind) {
    case MarginalKind::Gaussian:
      return ps.scale == 0.0 ? ps.location
                             : ps.location + ps.scale * inverse_normal_cdf(u);
    case MarginalKind::Gumbel:
      // CDF 1 - exp(-exp((x - alpha)/beta)).
      return ps.location + ps.scale * std::log(-std::log1p(-u));
    case MarginalKind::Laplace:
      return u < 0.5 ? ps.location + ps.scale * std::log(2.0 * u)
                     : ps.location - ps.scale * std::log(2.0 * (1.0 - u));
    case MarginalKind::StudentT:
      return ps.location + ps.scale * detail::student_t_quantile(u, spec.nu);
  }
  throw InvalidInput("unknown marginal kind");
}

const char* marginal_kind_name(MarginalKind kind) {
  switch (kind) {
    case MarginalKind::Gaussian: return "gaussian";
    case MarginalKind::Gumbel: return "gumbel";
    case MarginalKind::Laplace: return "laplace";
    case MarginalKind::StudentT: return "student-t";
  }
  return "?";
}

namespace detail {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double student_t_pdf(double x, double nu) {
  const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu);
  return std::exp(lg - 0.5 * std::log(nu * M_PI) -
                  0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double nu) {
  if (x == 0.0) return 0.5;
  const double ib = incomplete_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x > 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, nu);

  // Cornish-Fisher start from the normal quantile, then safeguarded Newton.
  const double z = inverse_normal_cdf(p);
  const double z3 = z * z * z;
  const double z5 = z3 * z * z;
  double x = z + (z3 + z) / (4.0 * nu) +
             (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
  double lo = 0.0;
  double hi = std::max(2.0 * x + 1.0, 8.0);
  while (student_t_cdf(hi, nu) < p) hi *= 2.0;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int it = 0; it < 60; ++it) {
    const double err = student_t_cdf(x, nu) - p;
    if (err > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double deriv = student_t_pdf(x, nu);
    double next = x - err / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect fallback
    if (std::fabs(next - x) < 1e-14 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

}  // namespace ufls
