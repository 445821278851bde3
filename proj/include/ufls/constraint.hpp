#pragma once

#include <optional>

#include "ufls/model.hpp"

namespace ufls {

/// Second-order cone data: the constraint reads ||A x + b||_2 <= c^T x + d.
/// A is the transposed covariance factor, so ||A x|| = sqrt(x^T Sigma x).
struct SocForm {
  Matrix A;
  Vector b;
  Vector c;
  double d = 0.0;

  /// Left minus right; feasible iff residual(x) <= 0.
  double residual(const Selection& x) const;
};

/// Objective and feasibility data for one method.
///   Deterministic(p):  coeffs_i = mu_i + sigma_i * Phi^-1(p),  k = 0
///   GaussianCC:        coeffs = mu,  k = Phi^-1(1 - eps)
///   DR CC:             coeffs = mu,  k = sqrt((1 - eps) / eps)
struct ConstraintForm {
  Method kind = Method::GaussianCC;
  Vector objective_coeffs;
  double safety_factor_k = 0.0;
  double threshold = 0.0;
  std::optional<SocForm> soc;  // CC methods only
};

ConstraintForm build_constraint(const AllocationProblem& problem);

/// Shortfall moments and slack of a candidate selection:
///   sigma_delta = sqrt(x^T Sigma x)
///   slack       = (coeffs^T x - L) - k * sigma_delta
/// The selection is feasible iff slack >= -1e-9.
ReliabilityMargin evaluate_margin(const ConstraintForm& form,
                                  const CovarianceMatrix& covariance,
                                  const Selection& selection);

/// coeffs^T x accumulated in ascending index order. Every objective the
/// engine reports goes through this one routine so that equal selections
/// produce bit-identical objectives everywhere.
double canonical_objective(const Vector& coeffs, const Selection& selection);

}  // namespace ufls
