#include "cshd/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "cshd/errors.hpp"
#include "cshd/matrix_core.hpp"

namespace cshd {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  throw ParameterError("unknown format '" + std::string(name) + "' (expected csv or md)");
}

void ExperimentReport::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    if (a.function != b.function) return a.function < b.function;
    const auto pa = std::vector<double>(a.point.data(), a.point.data() + a.point.size());
    const auto pb = std::vector<double>(b.point.data(), b.point.data() + b.point.size());
    if (pa != pb) return pa < pb;
    if (a.set != b.set) return a.set < b.set;
    return a.h > b.h;
  });
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string format_short(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

std::string format_short(const std::optional<double>& v) { return v ? format_short(*v) : "-"; }

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_number(const std::string& text, const char* column) {
  // strtod rather than stod: stod throws on subnormal values.
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || std::isspace(static_cast<unsigned char>(text.front())) || end != text.c_str() + text.size()) {
    throw ParameterError(std::string("report: invalid number '") + text + "' in column " + column);
  }
  return v;
}

std::optional<double> parse_optional(const std::string& text, const char* column) {
  if (text.empty()) return std::nullopt;
  return parse_number(text, column);
}

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParameterError("report: unterminated quoted field");
  return fields;
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const auto& r : report.rows) {
    out << quote_if_needed(r.function) << ',' << quote_if_needed(format_vector(r.point)) << ','
        << quote_if_needed(r.set) << ',' << format_number(r.h) << ',' << format_number(r.delta_s) << ','
        << format_optional(r.rer_diag) << ',' << format_number(r.abs_err_diag) << ','
        << format_optional(r.rer_grad) << ',' << format_optional(r.bound_total) << ','
        << format_optional(r.bound_cross) << ',' << r.evals << '\n';
  }
}

void write_markdown(const ExperimentReport& report, std::ostream& out) {
  out << "| function | point | set | h | delta_s | rer_diag | abs_err_diag | rer_grad | bound_total | "
         "bound_cross | evals |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    std::string point = "(";
    for (Index i = 0; i < r.point.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", r.point(i));
      point += (i > 0 ? ", " : "") + std::string(buf);
    }
    point += ")";
    out << "| " << r.function << " | " << point << " | " << r.set << " | " << format_short(r.h) << " | "
        << format_short(r.delta_s) << " | " << format_short(r.rer_diag) << " | "
        << format_short(r.abs_err_diag) << " | " << format_short(r.rer_grad) << " | "
        << format_short(r.bound_total) << " | " << format_short(r.bound_cross) << " | " << r.evals
        << " |\n";
  }
}

void write_report(const ExperimentReport& report, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Csv) {
    write_csv(report, out);
  } else {
    write_markdown(report, out);
  }
}

ExperimentReport parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("report: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kReportHeader) throw ParameterError("report: unexpected header '" + line + "'");

  ExperimentReport report;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) break;
    const auto f = split_csv_record(line);
    if (f.size() != 11) {
      throw ParameterError("report: expected 11 fields, got " + std::to_string(f.size()));
    }
    ExperimentRow r;
    r.function = f[0];
    std::vector<double> coords;
    std::stringstream ps(f[1]);
    for (std::string c; std::getline(ps, c, ',');) coords.push_back(parse_number(c, "point"));
    r.point = Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Index>(coords.size()));
    r.set = f[2];
    r.h = parse_number(f[3], "h");
    r.delta_s = parse_number(f[4], "delta_s");
    r.rer_diag = parse_optional(f[5], "rer_diag");
    r.abs_err_diag = parse_number(f[6], "abs_err_diag");
    r.rer_grad = parse_optional(f[7], "rer_grad");
    r.bound_total = parse_optional(f[8], "bound_total");
    r.bound_cross = parse_optional(f[9], "bound_cross");
    const double evals = parse_number(f[10], "evals");
    if (evals < 0 || evals != static_cast<double>(static_cast<std::uint64_t>(evals))) {
      throw ParameterError("report: evals must be a nonnegative integer");
    }
    r.evals = static_cast<std::uint64_t>(evals);
    report.rows.push_back(std::move(r));
  }
  return report;
}

void write_summary(const SummaryTable& table, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      out << (i ? "," : "") << quote_if_needed(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote_if_needed(row[i]);
      out << '\n';
    }
    return;
  }
  if (!table.title.empty()) out << "### " << table.title << "\n\n";
  out << '|';
  for (const auto& c : table.columns) out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& row : table.rows) {
    out << '|';
    for (const auto& v : row) out << ' ' << v << " |";
    out << '\n';
  }
}

}  // namespace cshd
