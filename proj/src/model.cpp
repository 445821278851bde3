#include "ufls/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace ufls {

FeederSet::FeederSet(std::vector<Feeder> feeders) : feeders_(std::move(feeders)) {
  if (feeders_.empty()) {
    throw InvalidInput("feeder set must not be empty");
  }
  std::set<int> seen;
  for (const Feeder& f : feeders_) {
    if (f.id <= 0) {
      throw InvalidInput("feeder id must be a positive integer, got " +
                         std::to_string(f.id));
    }
    if (!seen.insert(f.id).second) {
      throw InvalidInput("duplicate feeder id " + std::to_string(f.id));
    }
    if (!(f.sigma >= 0.0) || !std::isfinite(f.sigma) || !std::isfinite(f.mu)) {
      throw InvalidInput("feeder " + std::to_string(f.id) +
                         ": sigma must be finite and >= 0, mu finite");
    }
  }
  mu_.resize(size());
  sigma_.resize(size());
  for (Index i = 0; i < size(); ++i) {
    mu_[i] = feeders_[static_cast<std::size_t>(i)].mu;
    sigma_[i] = feeders_[static_cast<std::size_t>(i)].sigma;
  }
}

Index FeederSet::index_of(int id) const {
  for (Index i = 0; i < size(); ++i) {
    if (feeders_[static_cast<std::size_t>(i)].id == id) return i;
  }
  throw InvalidInput("unknown feeder id " + std::to_string(id));
}

Matrix psd_factor(const Matrix& a, double pivot_tol) {
  Eigen::LDLT<Matrix> ldlt(a);
  Vector d = ldlt.vectorD();
  for (Index i = 0; i < d.size(); ++i) {
    if (d[i] < -pivot_tol) {
      std::ostringstream msg;
      msg << "matrix is not positive semi-definite (pivot " << d[i] << " at "
          << i << ")";
      throw InvalidInput(msg.str());
    }
    if (d[i] < 0.0) d[i] = 0.0;
  }
  Matrix l = ldlt.matrixL();
  return ldlt.transpositionsP().transpose() * Matrix(l * d.cwiseSqrt().asDiagonal());
}

CovarianceMatrix::CovarianceMatrix(Matrix entries, Mode mode)
    : entries_(std::move(entries)), mode_(mode) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw InvalidInput("covariance matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) {
    throw InvalidInput("covariance matrix has non-finite entries");
  }
  if (max_symmetry_gap(entries_) > kSymmetryTolerance) {
    throw InvalidInput("covariance matrix is not symmetric within 1e-9 MW^2");
  }
  if (mode_ == Mode::Diagonal) {
    if ((entries_.diagonal().array() < 0.0).any()) {
      throw InvalidInput("diagonal covariance has a negative variance");
    }
    factor_ = Matrix(entries_.diagonal().cwiseSqrt().asDiagonal());
  } else {
    factor_ = psd_factor(entries_);
  }
  entrywise_nonnegative_ = (entries_.array() >= 0.0).all();
}

CovarianceMatrix CovarianceMatrix::diagonal(const FeederSet& feeders) {
  return CovarianceMatrix(Matrix(feeders.sigma().array().square().matrix().asDiagonal()),
                          Mode::Diagonal);
}

CovarianceMatrix CovarianceMatrix::diagonal(const Vector& variances) {
  return CovarianceMatrix(Matrix(variances.asDiagonal()), Mode::Diagonal);
}

CovarianceMatrix CovarianceMatrix::full(const Matrix& entries) {
  return CovarianceMatrix(entries, Mode::Full);
}

CovarianceMatrix CovarianceMatrix::scaled_by(double s) const {
  return CovarianceMatrix(Matrix(entries_ * (s * s)), mode_);
}

CovarianceMatrix CovarianceMatrix::row_col_scaled(const Vector& d) const {
  if (d.size() != dimension()) {
    throw InvalidInput("scaling vector dimension mismatch");
  }
  return CovarianceMatrix(Matrix(d.asDiagonal() * entries_ * d.asDiagonal()), mode_);
}

RiskSpec RiskSpec::deterministic(double percentile) {
  RiskSpec r;
  r.method = Method::Deterministic;
  r.percentile = percentile;
  r.validate();
  return r;
}

RiskSpec RiskSpec::gaussian_cc(double epsilon) {
  RiskSpec r;
  r.method = Method::GaussianCC;
  r.epsilon = epsilon;
  r.validate();
  return r;
}

RiskSpec RiskSpec::distributionally_robust_cc(double epsilon) {
  RiskSpec r;
  r.method = Method::DistributionallyRobustCC;
  r.epsilon = epsilon;
  r.validate();
  return r;
}

void RiskSpec::validate() const {
  if (method == Method::Deterministic) {
    if (!(percentile > 0.0 && percentile < 1.0)) {
      throw InvalidInput("percentile must lie in (0, 1)");
    }
  } else {
    // epsilon < 0.5 keeps Phi^-1(1 - epsilon) strictly positive.
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
      throw InvalidInput("epsilon must lie in (0, 0.5)");
    }
  }
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Deterministic: return "deterministic";
    case Method::GaussianCC: return "gaussian-cc";
    case Method::DistributionallyRobustCC: return "dr-cc";
  }
  return "?";
}

AllocationProblem build_problem(FeederSet feeders, CovarianceMatrix covariance,
                                double threshold, RiskSpec risk) {
  if (covariance.dimension() != feeders.size()) {
    std::ostringstream msg;
    msg << "covariance dimension " << covariance.dimension()
        << " does not match feeder count " << feeders.size();
    throw InvalidInput(msg.str());
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw InvalidInput("threshold must be > 0");
  }
  risk.validate();
  return AllocationProblem{std::move(feeders), std::move(covariance), threshold, risk};
}

AllocationProblem build_problem(FeederSet feeders, double threshold, RiskSpec risk) {
  CovarianceMatrix cov = CovarianceMatrix::diagonal(feeders);
  return build_problem(std::move(feeders), std::move(cov), threshold, risk);
}

AllocationProblem to_percentage_problem(const AllocationProblem& problem,
                                        double total_demand) {
  if (!(total_demand > 0.0) || !std::isfinite(total_demand)) {
    throw InvalidInput("total demand must be > 0");
  }
  std::vector<Feeder> scaled = problem.feeders.feeders();
  for (Feeder& f : scaled) {
    f.mu /= total_demand;
    f.sigma /= total_demand;
  }
  return AllocationProblem{FeederSet(std::move(scaled)),
                           problem.covariance.scaled_by(1.0 / total_demand),
                           problem.threshold / total_demand, problem.risk};
}

std::vector<int> AllocationResult::selected_ids(const FeederSet& feeders) const {
  if (selection.size() != feeders.size()) {
    throw InvalidInput("selection length does not match feeder set");
  }
  std::vector<int> ids;
  for (Index i = 0; i < selection.size(); ++i) {
    if (selection[i] != 0) ids.push_back(feeders[i].id);
  }
  return ids;
}

}  // namespace ufls
