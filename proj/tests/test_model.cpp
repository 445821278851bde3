#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "ufls/model.hpp"
#include "ufls/solver.hpp"

using namespace ufls;
using ufls::testing::table1;

TEST_CASE("feeder set validation") {
  CHECK_THROWS_AS(FeederSet({}), InvalidInput);
  CHECK_THROWS_AS(FeederSet({{1, 10.0, 1.0}, {1, 5.0, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(FeederSet({{1, 10.0, -0.5}}), InvalidInput);
  CHECK_THROWS_AS(FeederSet({{0, 10.0, 1.0}}), InvalidInput);
  // Exporting feeders (negative mean) are representable.
  const FeederSet fs({{7, -3.5, 1.0}});
  CHECK(fs[0].mu == -3.5);
  CHECK(fs.index_of(7) == 0);
  CHECK_THROWS_AS(fs.index_of(8), InvalidInput);
}

TEST_CASE("diagonal covariance from feeder sigmas") {
  const FeederSet fs = table1();
  const CovarianceMatrix cov = CovarianceMatrix::diagonal(fs);
  CHECK(cov.dimension() == 20);
  CHECK(cov.mode() == CovarianceMatrix::Mode::Diagonal);
  CHECK(cov.entries()(0, 0) == doctest::Approx(4.34 * 4.34).epsilon(1e-15));
  CHECK(cov.entries()(0, 1) == 0.0);
  CHECK(cov.entries()(8, 8) == doctest::Approx(1.04 * 1.04).epsilon(1e-15));
  // Factor is exactly diag(sigma).
  CHECK(cov.factor()(8, 8) == 1.04);
  CHECK(cov.factor()(3, 7) == 0.0);
  CHECK(cov.entrywise_nonnegative());
}

TEST_CASE("covariance symmetry and PSD tolerances") {
  Matrix a(2, 2);
  a << 1.0, 0.5, 0.5 + 2e-9, 1.0;
  CHECK_THROWS_AS(CovarianceMatrix::full(a), InvalidInput);
  a(1, 0) = 0.5 + 1e-10;  // within tolerance
  CHECK_NOTHROW(CovarianceMatrix::full(a));

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -1e-9;  // clamped to zero
  CHECK_NOTHROW(CovarianceMatrix::full(neg));
  neg(1, 1) = -1e-7;  // a hard error
  CHECK_THROWS_AS(CovarianceMatrix::full(neg), InvalidInput);
}

TEST_CASE("rank-1 covariance factors cleanly") {
  Vector s(3);
  s << 2.0, 3.0, 1.5;
  const Matrix sigma = s * s.transpose();
  const CovarianceMatrix cov = CovarianceMatrix::full(sigma);
  const Matrix recon = cov.factor() * cov.factor().transpose();
  CHECK((recon - sigma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_problem") {
  SUBCASE("table-1 instance") {
    const AllocationProblem p =
        build_problem(table1(), 250.0, RiskSpec::gaussian_cc(0.01));
    CHECK(p.feeders.size() == 20);
    CHECK(p.covariance.entries()(0, 0) == doctest::Approx(18.8356).epsilon(1e-12));
    CHECK(p.threshold == 250.0);
  }
  SUBCASE("zero-variance single feeder") {
    const AllocationProblem p =
        build_problem(FeederSet({{1, 10.0, 0.0}}), 5.0, RiskSpec::gaussian_cc(0.1));
    CHECK(p.covariance.entries()(0, 0) == 0.0);
    CHECK(p.covariance.factor()(0, 0) == 0.0);
  }
  SUBCASE("dimension mismatch") {
    const CovarianceMatrix small = CovarianceMatrix::diagonal(Vector::Ones(19));
    CHECK_THROWS_AS(build_problem(table1(), small, 250.0, RiskSpec::gaussian_cc(0.01)),
                    InvalidInput);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(build_problem(table1(), 0.0, RiskSpec::gaussian_cc(0.01)),
                    InvalidInput);
    CHECK_THROWS_AS(RiskSpec::gaussian_cc(0.5), InvalidInput);
    CHECK_THROWS_AS(RiskSpec::gaussian_cc(0.0), InvalidInput);
    CHECK_THROWS_AS(RiskSpec::deterministic(1.0), InvalidInput);
  }
}

TEST_CASE("percentage rescaling") {
  const AllocationProblem mw =
      build_problem(table1(), 250.0, RiskSpec::gaussian_cc(0.01));
  const AllocationProblem pct = to_percentage_problem(mw, 1000.0);
  CHECK(pct.threshold == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(pct.feeders.mu()[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(pct.covariance.entries()(0, 0) ==
        doctest::Approx(18.8356 / 1e6).epsilon(1e-12));
  CHECK_THROWS_AS(to_percentage_problem(mw, 0.0), InvalidInput);

  // Scaling never changes the argmin.
  const AllocationResult a = solve(mw);
  const AllocationResult b = solve(pct);
  CHECK(a.selection == b.selection);
}

TEST_CASE("sigma_delta has two equal expressions") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index m = 2 + static_cast<Index>(unif(rng) * 10);
    Matrix b(m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) b(i, j) = 2.0 * unif(rng) - 0.6;
    }
    Matrix sigma = b * b.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    const CovarianceMatrix cov = CovarianceMatrix::full(sigma);
    Selection x(m);
    for (Index i = 0; i < m; ++i) x[i] = unif(rng) < 0.5 ? 1 : 0;

    const double direct = std::sqrt(std::max(0.0, quadratic_form(sigma, x)));
    const double via_factor = (cov.factor().transpose() * x.cast<double>()).norm();
    CHECK(std::fabs(direct - via_factor) <= 1e-9 * (1.0 + direct));
  }
}

TEST_CASE("psd factor reconstructs the matrix") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 2 + static_cast<Index>(unif(rng) * 8);
    Matrix b(m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) b(i, j) = unif(rng);
    }
    Matrix sigma = b * b.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    const Matrix f = psd_factor(sigma);
    CHECK((f * f.transpose() - sigma).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("covariance scaling helpers") {
  const CovarianceMatrix diag = CovarianceMatrix::diagonal(table1());
  const CovarianceMatrix scaled = diag.scaled_by(0.5);
  CHECK(scaled.entries()(0, 0) == doctest::Approx(18.8356 * 0.25).epsilon(1e-12));
  CHECK(scaled.mode() == CovarianceMatrix::Mode::Diagonal);

  Vector d = Vector::Ones(20);
  d[11] = 1.5;
  const CovarianceMatrix rc = diag.row_col_scaled(d);
  CHECK(rc.entries()(11, 11) == doctest::Approx(11.6964).epsilon(1e-12));
  CHECK(rc.entries()(0, 0) == diag.entries()(0, 0));
  CHECK_THROWS_AS(diag.row_col_scaled(Vector::Ones(3)), InvalidInput);
}
