#include "cshd/sample_sets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace cshd {

std::string_view to_string(SetKind kind) noexcept {
  switch (kind) {
    case SetKind::CB:
      return "cb";
    case SetKind::RB:
      return "rb";
    case SetKind::CMPB:
      return "cmpb";
    case SetKind::RMPB:
      return "rmpb";
    case SetKind::Custom:
      return "custom";
  }
  return "custom";
}

SetKind parse_set_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cb") return SetKind::CB;
  if (lower == "rb") return SetKind::RB;
  if (lower == "cmpb") return SetKind::CMPB;
  if (lower == "rmpb") return SetKind::RMPB;
  throw ParameterError("unknown set kind '" + std::string(name) + "' (expected cb, rb, cmpb, rmpb)");
}

namespace {

bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

Matrix<double> parse_direction_matrix(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw ParameterError("direction matrix: empty input");
  }
  long n = 0;
  long k = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> k) || (header >> extra) || n < 1 || k < 1) {
      throw ParameterError("direction matrix: line " + std::to_string(line_no) +
                           ": expected header \"n k\" with positive integers");
    }
  }
  Matrix<double> m(n, k);
  for (long i = 0; i < n; ++i) {
    if (!next_content_line(in, line, line_no)) {
      throw ParameterError("direction matrix: expected " + std::to_string(n) + " rows, got " +
                           std::to_string(i));
    }
    std::istringstream row(line);
    for (long j = 0; j < k; ++j) {
      std::string token;
      if (!(row >> token)) {
        throw ParameterError("direction matrix: line " + std::to_string(line_no) + ": expected " +
                             std::to_string(k) + " values");
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw ParameterError("direction matrix: line " + std::to_string(line_no) +
                             ": invalid number '" + token + "'");
      }
      m(i, j) = value;
    }
    std::string extra;
    if (row >> extra) {
      throw ParameterError("direction matrix: line " + std::to_string(line_no) +
                           ": more than " + std::to_string(k) + " values");
    }
  }
  if (next_content_line(in, line, line_no)) {
    throw ParameterError("direction matrix: unexpected content after row " + std::to_string(n));
  }
  require_finite(m, "direction matrix");
  return m;
}

Matrix<double> read_direction_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParameterError("cannot open direction matrix file '" + path.string() + "'");
  }
  return parse_direction_matrix(in);
}

}  // namespace cshd
