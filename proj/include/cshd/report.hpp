#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cshd {

/// One (function, point, set, h) measurement.
struct ExperimentRow {
  std::string function;
  Eigen::VectorXd point;
  std::string set;
  double h = 0.0;
  double delta_s = 0.0;
  std::optional<double> rer_diag;  // empty when the true diagonal is zero
  double abs_err_diag = 0.0;
  std::optional<double> rer_grad;  // empty when the true gradient is zero
  std::optional<double> bound_total;
  std::optional<double> bound_cross;
  std::uint64_t evals = 0;
};

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(std::string_view name);

inline constexpr std::string_view kReportHeader =
    "function,point,set,h,delta_s,rer_diag,abs_err_diag,rer_grad,bound_total,bound_cross,evals";

struct ExperimentReport {
  std::vector<ExperimentRow> rows;

  /// Orders rows by function, point, set, then descending h.
  void sort();
};

/// Decimal text with 17 significant digits, which reads back to the same double.
std::string format_number(double value);

void write_csv(const ExperimentReport& report, std::ostream& out);
void write_markdown(const ExperimentReport& report, std::ostream& out);
void write_report(const ExperimentReport& report, ReportFormat format, std::ostream& out);

/// Reads a report written by write_csv. Stops at the first blank line so
/// that trailing summary blocks are ignored. Throws ParameterError.
ExperimentReport parse_csv(std::istream& in);

/// Splits one CSV record, honouring double quotes.
std::vector<std::string> split_csv_record(std::string_view line);

/// A small keyed table emitted after the report (estimates, bound factors,
/// fit summaries, reproduction checks).
struct SummaryTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_summary(const SummaryTable& table, ReportFormat format, std::ostream& out);

}  // namespace cshd
