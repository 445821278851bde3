#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ufls {

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Binary selection vector; entries are 0 or 1, index i refers to the i-th
// feeder of the FeederSet that produced it.
using Selection = Eigen::VectorXi;

using Index = Eigen::Index;

/// Invalid domain input (bad dimensions, out-of-range parameters, non-PSD
/// covariance, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries a human-readable location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No binary selection satisfies the constraint.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node limit hit before any feasible selection was found. When an incumbent
/// exists the solver returns it with proven_optimal = false instead.
class NodeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// x^T A x for a symmetric A and a 0/1 selection x.
template <typename DerivedA, typename DerivedX>
double quadratic_form(const Eigen::MatrixBase<DerivedA>& a,
                      const Eigen::MatrixBase<DerivedX>& x) {
  const Vector xd = x.template cast<double>();
  return xd.dot(a * xd);
}

template <typename Derived>
double max_symmetry_gap(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace ufls
