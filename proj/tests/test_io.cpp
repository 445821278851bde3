#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "test_support.hpp"
#include "ufls/io.hpp"
#include "ufls/solver.hpp"

using namespace ufls;
using ufls::testing::table1;

TEST_CASE("shipped table-1 data matches the transcription") {
  const FeederSet fs = io::read_feeders_file(std::string(UFLS_DATA_DIR) + "/table1.csv");
  const FeederSet want = table1();
  REQUIRE(fs.size() == want.size());
  for (Index i = 0; i < fs.size(); ++i) {
    CHECK(fs[i].id == want[i].id);
    CHECK(fs[i].mu == want[i].mu);
    CHECK(fs[i].sigma == want[i].sigma);
  }
}

TEST_CASE("shipped synthetic covariance is symmetric PSD and matches table-1 sigmas") {
  const Matrix sigma = io::read_covariance_file(std::string(UFLS_DATA_DIR) +
                                                "/synthetic_covariance.csv");
  REQUIRE(sigma.rows() == 20);
  const CovarianceMatrix cov = CovarianceMatrix::full(sigma);  // validates
  CHECK(cov.entrywise_nonnegative());
  const FeederSet fs = table1();
  for (Index i = 0; i < 20; ++i) {
    CHECK(std::sqrt(sigma(i, i)) == doctest::Approx(fs.sigma()[i]).epsilon(1e-12));
    for (Index j = 0; j < 20; ++j) {
      if (i != j) CHECK(sigma(i, j) > 0.0);
    }
  }
}

TEST_CASE("feeders round-trip exactly") {
  const FeederSet fs = table1();
  std::stringstream buffer;
  io::write_feeders(buffer, fs);
  const FeederSet back = io::read_feeders(buffer, "buffer");
  REQUIRE(back.size() == fs.size());
  for (Index i = 0; i < fs.size(); ++i) {
    CHECK(back[i].id == fs[i].id);
    CHECK(back[i].mu == fs[i].mu);
    CHECK(back[i].sigma == fs[i].sigma);
  }
}

TEST_CASE("feeder parse errors carry locations") {
  {
    std::stringstream in("feeder_id,mu_mw,sigma_mw\n1,10,2\n2,11\n");
    CHECK_THROWS_WITH_AS(io::read_feeders(in, "f.csv"),
                         doctest::Contains("f.csv:3"), ParseError);
  }
  {
    std::stringstream in("feeder_id,mu_mw,sigma_mw\n1,ten,2\n");
    CHECK_THROWS_WITH_AS(io::read_feeders(in, "f.csv"),
                         doctest::Contains("f.csv:2"), ParseError);
  }
  {
    std::stringstream in("id,mu,sigma\n1,10,2\n");
    CHECK_THROWS_AS(io::read_feeders(in, "f.csv"), ParseError);
  }
}

TEST_CASE("covariance file shape checks") {
  {
    std::stringstream in("1,0\n0\n");
    CHECK_THROWS_AS(io::read_covariance(in, "c.csv"), ParseError);
  }
  {
    std::stringstream in("1,0,0\n0,1,0\n");
    CHECK_THROWS_AS(io::read_covariance(in, "c.csv"), ParseError);
  }
  {
    std::stringstream in("");
    CHECK_THROWS_AS(io::read_covariance(in, "c.csv"), ParseError);
  }
  {
    std::stringstream buffer;
    Matrix m(2, 2);
    m << 1.25, 0.5, 0.5, 2.0;
    io::write_covariance(buffer, m);
    CHECK(io::read_covariance(buffer, "c.csv") == m);
  }
}

TEST_CASE("result document round-trips through text") {
  const AllocationProblem p = build_problem(table1(), 250.0, RiskSpec::gaussian_cc(0.01));
  const AllocationResult result = solve(p);

  std::stringstream buffer;
  io::write_result(buffer, result, p.feeders, p.threshold);

  double threshold = 0.0;
  const AllocationResult back = io::read_result(buffer, "r.txt", p.feeders, &threshold);
  CHECK(threshold == 250.0);
  CHECK(back.selection == result.selection);
  CHECK(back.objective_mw == result.objective_mw);
  CHECK(back.margin.slack == result.margin.slack);
  CHECK(back.margin.sigma_delta == result.margin.sigma_delta);
  CHECK(back.method_echo.method == Method::GaussianCC);
  CHECK(back.method_echo.epsilon == 0.01);
  CHECK(back.solver_stats.proven_optimal == result.solver_stats.proven_optimal);
}

TEST_CASE("result document rejects a mismatched feeder file") {
  const AllocationProblem p = build_problem(table1(), 250.0, RiskSpec::gaussian_cc(0.01));
  const AllocationResult result = solve(p);
  std::stringstream buffer;
  io::write_result(buffer, result, p.feeders, p.threshold);

  std::vector<Feeder> other = p.feeders.feeders();
  other[3].id = 99;
  CHECK_THROWS_AS(io::read_result(buffer, "r.txt", FeederSet(std::move(other)), nullptr),
                  ParseError);
}

TEST_CASE("document parser") {
  std::stringstream in(
      "# comment\n"
      "format = demo/1\n"
      "alpha = 3.5\n"
      "\n"
      "[table points]\n"
      "x,y\n"
      "1,2\n"
      "3,4\n"
      "\n"
      "beta = ok\n");
  const io::Document doc = io::read_document(in, "d.txt");
  CHECK(doc.require("format") == "demo/1");
  CHECK(doc.require("alpha") == "3.5");
  CHECK(doc.require("beta") == "ok");
  const io::Table& t = doc.require_table("points");
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});
  CHECK_THROWS_AS(doc.require("missing"), ParseError);
  CHECK_THROWS_AS(doc.require_table("missing"), ParseError);
}

TEST_CASE("report document shape") {
  const FeederSet fs = table1();
  const SamplingSpec spec = sampling_spec_for(fs, CovarianceMatrix::diagonal(fs),
                                              MarginalKind::StudentT, 5.0, 5000, 4);
  AllocationResult all;
  all.selection = Selection::Ones(20);
  const ValidationReport report = validate(all, spec, 250.0);

  std::stringstream buffer;
  io::write_report(buffer, report, MarginalKind::StudentT, 5.0, 250.0);
  const io::Document doc = io::read_document(buffer, "report.txt");
  CHECK(doc.require("distribution") == "student-t");
  CHECK(doc.require("nu") == "5");
  CHECK(doc.require("n_samples") == "5000");
  const io::Table& hist = doc.require_table("histogram");
  CHECK(hist.rows.size() == 60);
  std::int64_t total = 0;
  for (const auto& row : hist.rows) total += std::stoll(row[2]);
  CHECK(total == 5000);
}

TEST_CASE("figure-1 table keeps the robust constant on top") {
  std::stringstream buffer;
  io::write_figure1(buffer, {0.01, 0.25, 0.4999});
  const std::string text = buffer.str();
  CHECK(text.find("epsilon_fraction,gaussian_k,dr_k") == 0);
  std::stringstream in(text);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma1 = line.find(',');
    const auto comma2 = line.find(',', comma1 + 1);
    const double g = std::stod(line.substr(comma1 + 1, comma2 - comma1 - 1));
    const double dr = std::stod(line.substr(comma2 + 1));
    CHECK(dr > g);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK_THROWS_AS(io::write_figure1(buffer, {0.5}), InvalidInput);
}

TEST_CASE("format_double survives a round trip") {
  for (const double v : {0.1, 4.34, 18.8356, -1.0 / 3.0, 2.326347874040841e-12, 505.0}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}
