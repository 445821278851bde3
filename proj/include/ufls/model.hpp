#pragma once

#include <cstdint>
#include <vector>

#include "ufls/types.hpp"

namespace ufls {

/// One candidate feeder: identity, mean net-load and net-load standard
/// deviation (both MW). Negative mu models a net-exporting feeder.
struct Feeder {
  int id = 0;
  double mu = 0.0;
  double sigma = 0.0;
};

/// Ordered list of candidate feeders. The list order is the canonical index
/// order used by covariance rows and selection vectors everywhere.
class FeederSet {
 public:
  explicit FeederSet(std::vector<Feeder> feeders);

  Index size() const { return static_cast<Index>(feeders_.size()); }
  const Feeder& operator[](Index i) const { return feeders_[static_cast<std::size_t>(i)]; }
  const std::vector<Feeder>& feeders() const { return feeders_; }

  const Vector& mu() const { return mu_; }
  const Vector& sigma() const { return sigma_; }

  /// Canonical index of a feeder id; throws InvalidInput for unknown ids.
  Index index_of(int id) const;

 private:
  std::vector<Feeder> feeders_;
  Vector mu_;
  Vector sigma_;
};

// Entries of a covariance matrix at or above this (negative) pivot value are
// treated as zero; anything more negative is rejected as not PSD.
inline constexpr double kPsdPivotTolerance = 1e-8;
inline constexpr double kSymmetryTolerance = 1e-9;

/// Factor F with F * F^T = a, via pivoted LDLT with pivots in
/// [-pivot_tol, 0] clamped to zero. Throws InvalidInput if a pivot is more
/// negative than -pivot_tol.
Matrix psd_factor(const Matrix& a, double pivot_tol = kPsdPivotTolerance);

/// Symmetric PSD covariance of net-load forecast errors, MW^2. Validated on
/// construction; immutable afterwards.
class CovarianceMatrix {
 public:
  enum class Mode { Diagonal, Full };

  /// Diagonal covariance built from the feeders' sigmas.
  static CovarianceMatrix diagonal(const FeederSet& feeders);
  /// Diagonal covariance from a vector of variances (MW^2).
  static CovarianceMatrix diagonal(const Vector& variances);
  /// Full user-supplied covariance; checks symmetry and PSD-ness.
  static CovarianceMatrix full(const Matrix& entries);

  Index dimension() const { return entries_.rows(); }
  Mode mode() const { return mode_; }
  const Matrix& entries() const { return entries_; }

  /// F with F * F^T = entries(). For Diagonal mode this is exactly
  /// diag(sigma); sigma_delta(x) = ||F^T x||_2.
  const Matrix& factor() const { return factor_; }

  /// True if every entry is >= 0 (enables the solver's feasibility prune).
  bool entrywise_nonnegative() const { return entrywise_nonnegative_; }

  /// Entries scaled by s^2 (covariance of s-scaled variables).
  CovarianceMatrix scaled_by(double s) const;
  /// diag(d) * entries * diag(d); keeps Diagonal mode diagonal.
  CovarianceMatrix row_col_scaled(const Vector& d) const;

 private:
  CovarianceMatrix(Matrix entries, Mode mode);

  Matrix entries_;
  Matrix factor_;
  Mode mode_;
  bool entrywise_nonnegative_ = false;
};

enum class Method { Deterministic, GaussianCC, DistributionallyRobustCC };

/// Risk preference. Chance-constrained methods carry the acceptable violation
/// probability epsilon in (0, 0.5); the deterministic method carries the
/// net-load percentile used for its fixed coefficients.
struct RiskSpec {
  Method method = Method::GaussianCC;
  double epsilon = 0.0;     // CC methods
  double percentile = 0.0;  // Deterministic

  static RiskSpec deterministic(double percentile);
  static RiskSpec gaussian_cc(double epsilon);
  static RiskSpec distributionally_robust_cc(double epsilon);

  void validate() const;
};

const char* method_name(Method m);

/// A validated allocation instance: feeders, covariance, the minimum volume
/// of load L that must be shed (MW), and the risk preference.
struct AllocationProblem {
  FeederSet feeders;
  CovarianceMatrix covariance;
  double threshold = 0.0;
  RiskSpec risk;
};

AllocationProblem build_problem(FeederSet feeders, CovarianceMatrix covariance,
                                double threshold, RiskSpec risk);
/// Overload constructing the diagonal covariance from the feeder sigmas.
AllocationProblem build_problem(FeederSet feeders, double threshold, RiskSpec risk);

/// Rescales the problem to percentage-of-demand units: means, sigmas and
/// threshold divided by total_demand, covariance by total_demand^2. The
/// optimal selection set is invariant under this scaling.
AllocationProblem to_percentage_problem(const AllocationProblem& problem,
                                        double total_demand);

/// Shortfall moments and constraint slack of one candidate selection.
struct ReliabilityMargin {
  double mu_delta = 0.0;        // L - coeffs^T x (MW)
  double sigma_delta = 0.0;     // sqrt(x^T Sigma x) (MW)
  double safety_factor_k = 0.0;
  double slack = 0.0;           // (coeffs^T x - L) - k * sigma_delta (MW)

  bool feasible(double tol = 1e-9) const { return slack >= -tol; }
};

struct SolverStats {
  std::uint64_t nodes_explored = 0;
  bool proven_optimal = false;
};

struct AllocationResult {
  Selection selection;
  double objective_mw = 0.0;
  ReliabilityMargin margin;
  RiskSpec method_echo;
  SolverStats solver_stats;

  /// Ids of the selected feeders, in canonical order.
  std::vector<int> selected_ids(const FeederSet& feeders) const;
};

}  // namespace ufls
