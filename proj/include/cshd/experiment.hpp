#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cshd/centered_calculus.hpp"
#include "cshd/error_analysis.hpp"
#include "cshd/registry.hpp"
#include "cshd/report.hpp"
#include "cshd/sample_sets.hpp"

namespace cshd {

/// Which directions to use: a standard family, or a custom matrix read from
/// a file ("custom:PATH"). The label is what appears in report rows.
struct SetSpec {
  SetKind kind = SetKind::CB;
  std::optional<Eigen::MatrixXd> custom;
  std::string label;

  static SetSpec standard(SetKind kind);
  static SetSpec from_matrix(Eigen::MatrixXd m, std::string label);
  /// "cb" | "rb" | "cmpb" | "rmpb" | "custom:PATH".
  static SetSpec parse(std::string_view text);

  /// h times the family in dimension n (custom matrices must have n rows).
  SampleDirections<double> directions(Index n, double h) const;
};

/// Geometric step grid start, start*factor, ... down to stop (inclusive).
struct HGrid {
  double start = 1.0;
  double stop = 1e-4;
  double factor = 0.1;

  /// "START:STOP:FACTOR" with start >= stop > 0 and 0 < factor < 1.
  static HGrid parse(std::string_view text);
  std::vector<double> values() const;
};

/// Parses "v1,v2,...".
Eigen::VectorXd parse_point(std::string_view text);

struct ApproxOptions {
  std::optional<double> f0;
  bool with_bound = false;
};

struct ApproxResult {
  CenteredEstimates<double> estimates;
  Eigen::VectorXd true_gradient;
  Eigen::VectorXd true_diag;
  std::optional<BoundBreakdown<double>> bound;
  /// False when the Lipschitz constant came from lipschitz_oracle.
  bool lipschitz_certified = true;
  double lipschitz = 0.0;
  ExperimentRow row;
};

/// One CSHD/GCSG evaluation against the analytic truth. With `with_bound`
/// the error bound is required and BoundInapplicableError propagates;
/// otherwise the bound columns are filled only when the bound applies.
ApproxResult run_approx(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set, double h,
                        const ApproxOptions& options = {});

struct SweepResult {
  ExperimentReport report;
  /// Log-log slope over the truncation-dominated rows; empty if fewer than 3.
  std::optional<double> order;
  std::vector<double> fit_hs;
  double best_h = 0.0;
  double best_error = 0.0;  // RER, or the absolute error when the truth is zero
};

SweepResult run_sweep(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set,
                      const HGrid& grid);

/// Rows of a sweep that the order fit uses: errors above the round-off floor
/// 100 eps ||truth|| and steps no smaller than the best one. Falls back to
/// every row above the floor when that leaves fewer than three.
std::vector<std::size_t> truncation_rows(const std::vector<double>& hs, const std::vector<double>& abs_errors,
                                         double truth_norm);

inline constexpr double kPlateauLow = 1e-4;
inline constexpr double kPlateauHigh = 1e-2;
/// RER rising by this factor below the best step counts as non-monotone.
inline constexpr double kNonMonotoneFactor = 10.0;

/// Default grid for limit studies: 10 down to 1e-8, four points per decade.
HGrid default_limit_grid();

struct LimitStudy {
  ExperimentReport report;
  double plateau = 0.0;  // median RER over h in [kPlateauLow, kPlateauHigh]
  double grid_infimum = 0.0;
  double grid_argmin_h = 0.0;
  /// Minimum over h >= kPlateauLow, where round-off is negligible, refined
  /// by Brent's method in log h when the grid minimum there is interior.
  double refined_infimum = 0.0;
  double refined_argmin_h = 0.0;
  bool non_monotone = false;
};

LimitStudy run_limit_study(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set,
                           const HGrid& grid = default_limit_grid());

/// A reproduction check: passes iff lower <= computed <= upper. Informational
/// checks are reported but never fail.
struct Check {
  std::string name;
  double computed = 0.0;
  std::string reference;
  double lower = 0.0;
  double upper = 0.0;
  bool informational = false;

  bool passed() const { return informational || (computed >= lower && computed <= upper); }
};

struct Reproduction {
  std::string target;
  ExperimentReport report;
  std::vector<Check> checks;

  bool passed() const;
};

/// target: table1 | table2 | table3 | example41.
Reproduction reproduce(std::string_view target);

Eigen::VectorXd rosenbrock_point_x1();
Eigen::VectorXd rosenbrock_point_x2();
Eigen::VectorXd expprod_point();

}  // namespace cshd
