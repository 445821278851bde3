#include "ufls/constraint.hpp"

#include <cmath>

#include "ufls/dist.hpp"

namespace ufls {

double SocForm::residual(const Selection& x) const {
  const Vector xd = x.cast<double>();
  return (A * xd + b).norm() - (c.dot(xd) + d);
}

ConstraintForm build_constraint(const AllocationProblem& problem) {
  problem.risk.validate();
  ConstraintForm form;
  form.kind = problem.risk.method;
  form.threshold = problem.threshold;

  const Vector& mu = problem.feeders.mu();
  switch (problem.risk.method) {
    case Method::Deterministic: {
      const double q = inverse_normal_cdf(problem.risk.percentile);
      form.objective_coeffs = mu + q * problem.feeders.sigma();
      form.safety_factor_k = 0.0;
      return form;
    }
    case Method::GaussianCC:
      form.safety_factor_k = inverse_normal_cdf(1.0 - problem.risk.epsilon);
      break;
    case Method::DistributionallyRobustCC:
      form.safety_factor_k = cantelli_inverse(1.0 - problem.risk.epsilon);
      break;
  }
  form.objective_coeffs = mu;

  SocForm soc;
  soc.A = problem.covariance.factor().transpose();
  soc.b = Vector::Zero(mu.size());
  soc.c = mu / form.safety_factor_k;
  soc.d = -problem.threshold / form.safety_factor_k;
  form.soc = std::move(soc);
  return form;
}

double canonical_objective(const Vector& coeffs, const Selection& selection) {
  double total = 0.0;
  for (Index i = 0; i < selection.size(); ++i) {
    if (selection[i] != 0) total += coeffs[i];
  }
  return total;
}

ReliabilityMargin evaluate_margin(const ConstraintForm& form,
                                  const CovarianceMatrix& covariance,
                                  const Selection& selection) {
  if (selection.size() != form.objective_coeffs.size() ||
      selection.size() != covariance.dimension()) {
    throw InvalidInput("selection length does not match the constraint dimension");
  }
  ReliabilityMargin margin;
  const double value = canonical_objective(form.objective_coeffs, selection);
  margin.mu_delta = form.threshold - value;
  margin.sigma_delta = std::sqrt(std::max(0.0, quadratic_form(covariance.entries(), selection)));
  margin.safety_factor_k = form.safety_factor_k;
  margin.slack = (value - form.threshold) - form.safety_factor_k * margin.sigma_delta;
  return margin;
}

}  // namespace ufls
