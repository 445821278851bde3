#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "ufls/constraint.hpp"
#include "ufls/dist.hpp"

using namespace ufls;
using ufls::testing::table1;
using ufls::testing::table1_mu;
using ufls::testing::table1_sigma;

TEST_CASE("safety factors per method") {
  const FeederSet fs = table1();
  SUBCASE("gaussian k at epsilon 1%") {
    const ConstraintForm form =
        build_constraint(build_problem(fs, 250.0, RiskSpec::gaussian_cc(0.01)));
    CHECK(std::fabs(form.safety_factor_k - 2.326347874) < 1e-9);
    CHECK(form.objective_coeffs == fs.mu());
  }
  SUBCASE("distributionally robust k at epsilon 1%") {
    const ConstraintForm form = build_constraint(
        build_problem(fs, 250.0, RiskSpec::distributionally_robust_cc(0.01)));
    CHECK(std::fabs(form.safety_factor_k - std::sqrt(99.0)) < 1e-12);
    CHECK(std::fabs(form.safety_factor_k - 9.949874371) < 1e-9);
  }
  SUBCASE("median percentile reduces to the means") {
    const ConstraintForm form =
        build_constraint(build_problem(fs, 250.0, RiskSpec::deterministic(0.5)));
    CHECK(form.safety_factor_k == 0.0);
    CHECK(form.objective_coeffs == fs.mu());
    CHECK(!form.soc.has_value());
  }
  SUBCASE("deterministic percentile shifts by sigma times the quantile") {
    const ConstraintForm form =
        build_constraint(build_problem(fs, 250.0, RiskSpec::deterministic(0.3)));
    const double q = inverse_normal_cdf(0.3);
    CHECK(q < 0.0);
    for (Index i = 0; i < fs.size(); ++i) {
      CHECK(form.objective_coeffs[i] ==
            doctest::Approx(fs.mu()[i] + q * fs.sigma()[i]).epsilon(1e-14));
    }
  }
  SUBCASE("dr dominates gaussian for equal epsilon") {
    for (const double eps : {0.01, 0.05, 0.2, 0.49}) {
      const auto g =
          build_constraint(build_problem(fs, 250.0, RiskSpec::gaussian_cc(eps)));
      const auto dr = build_constraint(
          build_problem(fs, 250.0, RiskSpec::distributionally_robust_cc(eps)));
      CHECK(dr.safety_factor_k > g.safety_factor_k);
    }
  }
}

TEST_CASE("margin evaluation on table-1 selections") {
  const FeederSet fs = table1();
  const AllocationProblem problem =
      build_problem(fs, 250.0, RiskSpec::gaussian_cc(0.01));
  const ConstraintForm form = build_constraint(problem);

  SUBCASE("feeders 9 and 12") {
    Selection sel = Selection::Zero(20);
    sel[8] = 1;   // feeder 9
    sel[11] = 1;  // feeder 12
    const ReliabilityMargin m = evaluate_margin(form, problem.covariance, sel);
    CHECK(m.sigma_delta ==
          doctest::Approx(std::sqrt(1.04 * 1.04 + 2.28 * 2.28)).epsilon(1e-12));
    CHECK(m.sigma_delta == doctest::Approx(2.50599).epsilon(1e-5));
    CHECK(250.0 - m.mu_delta == doctest::Approx(67.0).epsilon(1e-15));
    CHECK(!m.feasible());
  }
  SUBCASE("empty selection is infeasible for every method") {
    const Selection sel = Selection::Zero(20);
    for (const RiskSpec risk :
         {RiskSpec::deterministic(0.5), RiskSpec::gaussian_cc(0.01),
          RiskSpec::distributionally_robust_cc(0.01)}) {
      const AllocationProblem p = build_problem(fs, 250.0, risk);
      const ReliabilityMargin m = evaluate_margin(build_constraint(p), p.covariance, sel);
      CHECK(m.mu_delta == 250.0);
      CHECK(m.sigma_delta == 0.0);
      CHECK(!m.feasible());
    }
  }
  SUBCASE("all-ones selection is feasible at epsilon 1%") {
    const Selection sel = Selection::Ones(20);
    const ReliabilityMargin m = evaluate_margin(form, problem.covariance, sel);
    double mu_total = 0.0;
    double var_total = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      mu_total += table1_mu()[i];
      var_total += table1_sigma()[i] * table1_sigma()[i];
    }
    CHECK(mu_total == 505.0);
    CHECK(m.slack == doctest::Approx(505.0 - 250.0 -
                                     form.safety_factor_k * std::sqrt(var_total))
                         .epsilon(1e-12));
    CHECK(m.slack > 0.0);
    CHECK(m.feasible());
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(evaluate_margin(form, problem.covariance, Selection::Zero(19)),
                    InvalidInput);
  }
}

TEST_CASE("soc form agrees with the margin slack") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RiskSpec risk = unif(rng) < 0.5
                              ? RiskSpec::gaussian_cc(0.005 + 0.48 * unif(rng))
                              : RiskSpec::distributionally_robust_cc(0.005 + 0.48 * unif(rng));
    const AllocationProblem p = ufls::testing::random_instance(rng, 10, risk);
    const ConstraintForm form = build_constraint(p);
    REQUIRE(form.soc.has_value());

    Selection x(p.feeders.size());
    for (Index i = 0; i < x.size(); ++i) x[i] = unif(rng) < 0.5 ? 1 : 0;
    const ReliabilityMargin m = evaluate_margin(form, p.covariance, x);
    if (std::fabs(m.slack) < 1e-9) continue;  // boundary ties are resolved elsewhere
    CHECK((form.soc->residual(x) <= 0.0) == (m.slack >= 0.0));
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("feasible sets nest") {
  std::mt19937_64 rng(5108);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps1 = 0.005 + 0.2 * unif(rng);
    const double eps2 = eps1 + 0.25 * unif(rng) + 1e-3;
    const AllocationProblem base =
        ufls::testing::random_instance(rng, 10, RiskSpec::gaussian_cc(eps1));
    Selection x(base.feeders.size());
    for (Index i = 0; i < x.size(); ++i) x[i] = unif(rng) < 0.6 ? 1 : 0;

    const auto margin_for = [&](const RiskSpec& risk) {
      const AllocationProblem p =
          build_problem(base.feeders, base.covariance, base.threshold, risk);
      return evaluate_margin(build_constraint(p), p.covariance, x);
    };

    // DR-feasible implies Gaussian-feasible at the same epsilon.
    if (margin_for(RiskSpec::distributionally_robust_cc(eps1)).feasible()) {
      CHECK(margin_for(RiskSpec::gaussian_cc(eps1)).feasible());
    }
    // Feasible at the stricter epsilon implies feasible at the looser one.
    if (margin_for(RiskSpec::gaussian_cc(eps1)).feasible()) {
      CHECK(margin_for(RiskSpec::gaussian_cc(eps2)).feasible());
    }
    if (margin_for(RiskSpec::distributionally_robust_cc(eps1)).feasible()) {
      CHECK(margin_for(RiskSpec::distributionally_robust_cc(eps2)).feasible());
    }
  }
}

TEST_CASE("zero variance collapses all methods to the same feasible set") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Feeder> feeders;
  for (int i = 1; i <= 8; ++i) {
    feeders.push_back({i, 40.0 * unif(rng), 0.0});
  }
  const FeederSet fs(std::move(feeders));
  const double threshold = 60.0;

  const auto form_det =
      build_constraint(build_problem(fs, threshold, RiskSpec::deterministic(0.5)));
  const auto form_g =
      build_constraint(build_problem(fs, threshold, RiskSpec::gaussian_cc(0.01)));
  const auto form_dr = build_constraint(
      build_problem(fs, threshold, RiskSpec::distributionally_robust_cc(0.01)));
  const CovarianceMatrix cov = CovarianceMatrix::diagonal(fs);

  for (int bits = 0; bits < 256; ++bits) {
    Selection x(8);
    for (Index i = 0; i < 8; ++i) x[i] = (bits >> i) & 1;
    const bool f_det = evaluate_margin(form_det, cov, x).feasible();
    const bool f_g = evaluate_margin(form_g, cov, x).feasible();
    const bool f_dr = evaluate_margin(form_dr, cov, x).feasible();
    CHECK(f_det == f_g);
    CHECK(f_g == f_dr);
  }
}
