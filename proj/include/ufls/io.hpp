#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ufls/fairness.hpp"
#include "ufls/model.hpp"
#include "ufls/montecarlo.hpp"

namespace ufls::io {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// --- CSV data files ------------------------------------------------------

inline constexpr const char* kFeedersHeader = "feeder_id,mu_mw,sigma_mw";

FeederSet read_feeders(std::istream& in, const std::string& name);
FeederSet read_feeders_file(const std::string& path);
void write_feeders(std::ostream& out, const FeederSet& feeders);

/// Dense m x m matrix of MW^2 entries, no header.
Matrix read_covariance(std::istream& in, const std::string& name);
Matrix read_covariance_file(const std::string& path);
void write_covariance(std::ostream& out, const Matrix& entries);

// --- structured result / report documents --------------------------------
//
// A document is UTF-8 text made of `key = value` lines plus named tables:
//
//   [table NAME]
//   col_a,col_b
//   1,2
//
// A blank line ends a table. Lines starting with '#' are comments.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Document {
  std::map<std::string, std::string> values;
  std::map<std::string, Table> tables;

  const std::string& require(const std::string& key) const;
  const Table& require_table(const std::string& name) const;
};

Document read_document(std::istream& in, const std::string& name);

void write_result(std::ostream& out, const AllocationResult& result,
                  const FeederSet& feeders, double threshold);
/// Re-reads a result document against the same feeder file; throws ParseError
/// if the feeder ids disagree.
AllocationResult read_result(std::istream& in, const std::string& name,
                             const FeederSet& feeders, double* threshold_out = nullptr);

void write_report(std::ostream& out, const ValidationReport& report,
                  MarginalKind kind, double nu, double threshold);

struct SweepRow {
  double parameter = 0.0;  // percentile or epsilon, fraction
  double objective_mw = 0.0;
  double violation_fraction = 0.0;
  double expected_disconnection_mw = 0.0;
};

void write_sweep(std::ostream& out, const std::string& parameter_column,
                 const std::vector<SweepRow>& rows);

void write_figure1(std::ostream& out, const std::vector<double>& epsilons);

struct FairnessRow {
  double factor = 1.0;
  FairnessStudy study;
};

void write_fairness(std::ostream& out, const std::vector<FairnessRow>& rows,
                    const FeederSet& feeders, const RiskSpec& risk, double threshold);

void write_correlation_study(std::ostream& out, const CorrelationStudy& study,
                             const FeederSet& feeders, const RiskSpec& risk,
                             double threshold);

}  // namespace ufls::io
