#include "ufls/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ufls/dist.hpp"

namespace ufls::io {

namespace {

std::string location(const std::string& name, int line) {
  return name + ":" + std::to_string(line);
}

bool next_line(std::istream& in, std::string& line, int& line_no) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no;
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& where) {
  const std::string t = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(where + ": not a number: '" + field + "'");
  }
  return value;
}

long long parse_int(const std::string& field, const std::string& where) {
  const std::string t = trim(field);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(where + ": not an integer: '" + field + "'");
  }
  return value;
}

std::string join_ids(const std::vector<int>& ids, char sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(ids[i]);
  }
  return out;
}

RiskSpec parse_risk(const Document& doc, const std::string& name) {
  const std::string& method = doc.require("method");
  if (method == "deterministic") {
    return RiskSpec::deterministic(
        parse_double(doc.require("percentile_fraction"), name));
  }
  if (method == "gaussian-cc") {
    return RiskSpec::gaussian_cc(parse_double(doc.require("epsilon_fraction"), name));
  }
  if (method == "dr-cc") {
    return RiskSpec::distributionally_robust_cc(
        parse_double(doc.require("epsilon_fraction"), name));
  }
  throw ParseError(name + ": unknown method '" + method + "'");
}

void write_risk(std::ostream& out, const RiskSpec& risk) {
  out << "method = " << method_name(risk.method) << "\n";
  if (risk.method == Method::Deterministic) {
    out << "percentile_fraction = " << format_double(risk.percentile) << "\n";
  } else {
    out << "epsilon_fraction = " << format_double(risk.epsilon) << "\n";
  }
}

void write_report_block(std::ostream& out, const std::string& prefix,
                        const ValidationReport& report) {
  out << prefix << "violation_fraction = " << format_double(report.violation_fraction)
      << "\n";
  out << prefix << "expected_disconnection_mw = "
      << format_double(report.expected_disconnection_mw) << "\n";
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

FeederSet read_feeders(std::istream& in, const std::string& name) {
  std::string line;
  int line_no = 0;
  if (!next_line(in, line, line_no) || trim(line) != kFeedersHeader) {
    throw ParseError(location(name, 1) + ": expected header '" +
                     std::string(kFeedersHeader) + "'");
  }
  std::vector<Feeder> feeders;
  while (next_line(in, line, line_no)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 3) {
      throw ParseError(location(name, line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    Feeder f;
    f.id = static_cast<int>(parse_int(fields[0], location(name, line_no)));
    f.mu = parse_double(fields[1], location(name, line_no));
    f.sigma = parse_double(fields[2], location(name, line_no));
    feeders.push_back(f);
  }
  return FeederSet(std::move(feeders));
}

FeederSet read_feeders_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feeders file '" + path + "'");
  return read_feeders(in, path);
}

void write_feeders(std::ostream& out, const FeederSet& feeders) {
  out << kFeedersHeader << "\n";
  for (const Feeder& f : feeders.feeders()) {
    out << f.id << "," << format_double(f.mu) << "," << format_double(f.sigma) << "\n";
  }
}

Matrix read_covariance(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (next_line(in, line, line_no)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      row.push_back(parse_double(f, location(name, line_no)));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(location(name, line_no) + ": ragged row, expected " +
                       std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(name + ": empty covariance file");
  if (rows.size() != rows.front().size()) {
    throw ParseError(name + ": covariance must be square, got " +
                     std::to_string(rows.size()) + " x " +
                     std::to_string(rows.front().size()));
  }
  const Index m = static_cast<Index>(rows.size());
  Matrix entries(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      entries(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return entries;
}

Matrix read_covariance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open covariance file '" + path + "'");
  return read_covariance(in, path);
}

void write_covariance(std::ostream& out, const Matrix& entries) {
  for (Index i = 0; i < entries.rows(); ++i) {
    for (Index j = 0; j < entries.cols(); ++j) {
      if (j) out << ",";
      out << format_double(entries(i, j));
    }
    out << "\n";
  }
}

const std::string& Document::require(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ParseError("missing key '" + key + "'");
  return it->second;
}

const Table& Document::require_table(const std::string& name) const {
  const auto it = tables.find(name);
  if (it == tables.end()) throw ParseError("missing table '" + name + "'");
  return it->second;
}

Document read_document(std::istream& in, const std::string& name) {
  Document doc;
  std::string line;
  int line_no = 0;
  Table* current = nullptr;
  bool want_header = false;
  while (next_line(in, line, line_no)) {
    const std::string t = trim(line);
    if (t.empty()) {
      current = nullptr;
      continue;
    }
    if (t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.rfind("[table ", 0) != 0 || t.back() != ']') {
        throw ParseError(location(name, line_no) + ": malformed section header");
      }
      const std::string table_name = trim(t.substr(7, t.size() - 8));
      current = &doc.tables[table_name];
      want_header = true;
      continue;
    }
    if (current != nullptr) {
      if (want_header) {
        current->header = split(t, ',');
        want_header = false;
      } else {
        current->rows.push_back(split(t, ','));
        if (current->rows.back().size() != current->header.size()) {
          throw ParseError(location(name, line_no) + ": row width differs from header");
        }
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(location(name, line_no) + ": expected 'key = value'");
    }
    doc.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return doc;
}

void write_result(std::ostream& out, const AllocationResult& result,
                  const FeederSet& feeders, double threshold) {
  out << "format = ufls-result/1\n";
  write_risk(out, result.method_echo);
  out << "threshold_mw = " << format_double(threshold) << "\n";
  out << "objective_mw = " << format_double(result.objective_mw) << "\n";
  out << "mu_delta_mw = " << format_double(result.margin.mu_delta) << "\n";
  out << "sigma_delta_mw = " << format_double(result.margin.sigma_delta) << "\n";
  out << "safety_factor_k = " << format_double(result.margin.safety_factor_k) << "\n";
  out << "slack_mw = " << format_double(result.margin.slack) << "\n";
  out << "nodes_explored = " << result.solver_stats.nodes_explored << "\n";
  out << "proven_optimal = " << (result.solver_stats.proven_optimal ? "true" : "false")
      << "\n";
  out << "selected_feeder_ids = " << join_ids(result.selected_ids(feeders), ',') << "\n";
  out << "\n[table selection]\nfeeder_id,selected\n";
  for (Index i = 0; i < feeders.size(); ++i) {
    out << feeders[i].id << "," << (result.selection[i] != 0 ? 1 : 0) << "\n";
  }
}

AllocationResult read_result(std::istream& in, const std::string& name,
                             const FeederSet& feeders, double* threshold_out) {
  const Document doc = read_document(in, name);
  if (doc.values.count("format") && doc.require("format") != "ufls-result/1") {
    throw ParseError(name + ": unsupported format '" + doc.require("format") + "'");
  }
  AllocationResult result;
  result.method_echo = parse_risk(doc, name);
  result.objective_mw = parse_double(doc.require("objective_mw"), name);
  result.margin.mu_delta = parse_double(doc.require("mu_delta_mw"), name);
  result.margin.sigma_delta = parse_double(doc.require("sigma_delta_mw"), name);
  result.margin.safety_factor_k = parse_double(doc.require("safety_factor_k"), name);
  result.margin.slack = parse_double(doc.require("slack_mw"), name);
  result.solver_stats.nodes_explored =
      static_cast<std::uint64_t>(parse_int(doc.require("nodes_explored"), name));
  result.solver_stats.proven_optimal = doc.require("proven_optimal") == "true";
  if (threshold_out != nullptr) {
    *threshold_out = parse_double(doc.require("threshold_mw"), name);
  }

  const Table& table = doc.require_table("selection");
  if (table.header != std::vector<std::string>{"feeder_id", "selected"}) {
    throw ParseError(name + ": selection table must have header 'feeder_id,selected'");
  }
  if (static_cast<Index>(table.rows.size()) != feeders.size()) {
    throw ParseError(name + ": selection table has " + std::to_string(table.rows.size()) +
                     " rows but the feeder file has " + std::to_string(feeders.size()));
  }
  result.selection = Selection::Zero(feeders.size());
  for (Index i = 0; i < feeders.size(); ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const int id = static_cast<int>(parse_int(row[0], name));
    if (id != feeders[i].id) {
      throw ParseError(name + ": selection row " + std::to_string(i + 1) +
                       " has feeder id " + std::to_string(id) + ", feeder file has " +
                       std::to_string(feeders[i].id));
    }
    const long long flag = parse_int(row[1], name);
    if (flag != 0 && flag != 1) {
      throw ParseError(name + ": 'selected' must be 0 or 1");
    }
    result.selection[i] = static_cast<int>(flag);
  }
  return result;
}

void write_report(std::ostream& out, const ValidationReport& report,
                  MarginalKind kind, double nu, double threshold) {
  out << "format = ufls-report/1\n";
  out << "distribution = " << marginal_kind_name(kind) << "\n";
  if (kind == MarginalKind::StudentT) {
    out << "nu = " << format_double(nu) << "\n";
  }
  out << "threshold_mw = " << format_double(threshold) << "\n";
  out << "n_samples = " << report.n_samples << "\n";
  out << "seed = " << report.seed << "\n";
  out << "violation_fraction = " << format_double(report.violation_fraction) << "\n";
  out << "expected_disconnection_mw = "
      << format_double(report.expected_disconnection_mw) << "\n";
  out << "\n[table histogram]\nbin_lo_mw,bin_hi_mw,count\n";
  for (std::size_t b = 0; b < report.histogram.counts.size(); ++b) {
    out << format_double(report.histogram.edges[static_cast<Index>(b)]) << ","
        << format_double(report.histogram.edges[static_cast<Index>(b) + 1]) << ","
        << report.histogram.counts[b] << "\n";
  }
}

void write_sweep(std::ostream& out, const std::string& parameter_column,
                 const std::vector<SweepRow>& rows) {
  out << parameter_column
      << ",objective_mw,violation_fraction,expected_disconnection_mw\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.parameter) << "," << format_double(row.objective_mw) << ","
        << format_double(row.violation_fraction) << ","
        << format_double(row.expected_disconnection_mw) << "\n";
  }
}

void write_figure1(std::ostream& out, const std::vector<double>& epsilons) {
  out << "epsilon_fraction,gaussian_k,dr_k\n";
  for (const double eps : epsilons) {
    if (!(eps > 0.0 && eps < 0.5)) {
      throw InvalidInput("epsilon grid must lie in (0, 0.5)");
    }
    out << format_double(eps) << "," << format_double(inverse_normal_cdf(1.0 - eps))
        << "," << format_double(cantelli_inverse(1.0 - eps)) << "\n";
  }
}

void write_fairness(std::ostream& out, const std::vector<FairnessRow>& rows,
                    const FeederSet& feeders, const RiskSpec& risk, double threshold) {
  out << "format = ufls-fairness/1\n";
  write_risk(out, risk);
  out << "threshold_mw = " << format_double(threshold) << "\n";
  if (!rows.empty()) {
    const FairnessStudy& first = rows.front().study;
    out << "baseline_objective_mw = " << format_double(first.baseline_result.objective_mw)
        << "\n";
    write_report_block(out, "baseline_", first.baseline_report);
    out << "baseline_selected_feeder_ids = "
        << join_ids(first.baseline_result.selected_ids(feeders), ',') << "\n";
  }
  out << "\n[table factors]\n";
  out << "factor,objective_mw,violation_fraction,expected_disconnection_mw,"
         "added_feeder_ids,removed_feeder_ids\n";
  for (const FairnessRow& row : rows) {
    out << format_double(row.factor) << ","
        << format_double(row.study.adjusted_result.objective_mw) << ","
        << format_double(row.study.adjusted_report.violation_fraction) << ","
        << format_double(row.study.adjusted_report.expected_disconnection_mw) << ","
        << join_ids(row.study.added_ids, ';') << ","
        << join_ids(row.study.removed_ids, ';') << "\n";
  }
}

void write_correlation_study(std::ostream& out, const CorrelationStudy& study,
                             const FeederSet& feeders, const RiskSpec& risk,
                             double threshold) {
  out << "format = ufls-correlation/1\n";
  write_risk(out, risk);
  out << "threshold_mw = " << format_double(threshold) << "\n";
  out << "case1_objective_mw = " << format_double(study.case1_result.objective_mw)
      << "\n";
  write_report_block(out, "case1_", study.case1_report);
  out << "case1_selected_feeder_ids = "
      << join_ids(study.case1_result.selected_ids(feeders), ',') << "\n";
  out << "case2_objective_mw = " << format_double(study.case2_result.objective_mw)
      << "\n";
  write_report_block(out, "case2_", study.case2_report);
  out << "case2_selected_feeder_ids = "
      << join_ids(study.case2_result.selected_ids(feeders), ',') << "\n";
}

}  // namespace ufls::io
