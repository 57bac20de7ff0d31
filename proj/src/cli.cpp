#include "cshd/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "cshd/experiment.hpp"
#include "cshd/report.hpp"

namespace cshd::cli {

namespace {

struct Options {
  std::string function;
  std::string point;
  std::string set = "cb";
  std::optional<double> h;
  std::string h_grid;
  std::optional<double> f0;
  bool with_bound = false;
  std::string format = "csv";
  std::string out_path;
  std::string target;
};

std::string registry_names() {
  std::string names;
  for (const auto& f : function_registry()) names += (names.empty() ? "" : ", ") + f.name;
  return names;
}

std::string num(double v) { return format_number(v); }
std::string num(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

const RegistryFunction& require_function(const Options& o) {
  if (o.function.empty()) throw ParameterError("--function is required (one of " + registry_names() + ")");
  return find_function(o.function);
}

Eigen::VectorXd require_point(const Options& o) {
  if (o.point.empty()) throw ParameterError("--point is required");
  return parse_point(o.point);
}

int run_approx_command(const Options& o, ReportFormat format, std::ostream& out) {
  const auto& f = require_function(o);
  const auto x0 = require_point(o);
  if (!o.h) throw ParameterError("--h is required");
  const auto set = SetSpec::parse(o.set);
  const auto r = run_approx(f, x0, set, *o.h, {o.f0, o.with_bound});

  ExperimentReport report{{r.row}};
  write_report(report, format, out);

  SummaryTable est{"Estimates", {"component", "gradient", "diag_hessian", "true_gradient", "true_diag_hessian"}, {}};
  for (Index i = 0; i < x0.size(); ++i) {
    est.rows.push_back({std::to_string(i + 1), num(r.estimates.gradient.value(i)),
                        num(r.estimates.diag_hessian.value(i)), num(r.true_gradient(i)), num(r.true_diag(i))});
  }
  out << '\n';
  write_summary(est, format, out);

  if (o.with_bound && r.bound) {
    SummaryTable bound{"Error bound",
                       {"pinv_norm", "lipschitz", "lipschitz_source", "lipschitz_term", "cross_term", "total",
                        "corollary_total", "w_rank_deficient"},
                       {{num(r.bound->pinv_norm), num(r.lipschitz), r.lipschitz_certified ? "certified" : "estimate",
                         num(r.bound->lipschitz_term), num(r.bound->cross_term), num(r.bound->total),
                         num(r.bound->corollary_total), r.estimates.diag_hessian.rank_deficient ? "1" : "0"}}};
    out << '\n';
    write_summary(bound, format, out);
  }
  return kSuccess;
}

int run_sweep_command(const Options& o, ReportFormat format, std::ostream& out) {
  const auto& f = require_function(o);
  const auto x0 = require_point(o);
  const auto grid = o.h_grid.empty() ? HGrid{} : HGrid::parse(o.h_grid);
  const auto r = run_sweep(f, x0, SetSpec::parse(o.set), grid);
  write_report(r.report, format, out);
  SummaryTable summary{"Sweep summary",
                       {"fitted_order", "fit_points", "best_h", "best_error"},
                       {{num(r.order), std::to_string(r.fit_hs.size()), num(r.best_h), num(r.best_error)}}};
  out << '\n';
  write_summary(summary, format, out);
  return kSuccess;
}

int run_limit_command(const Options& o, ReportFormat format, std::ostream& out) {
  const auto& f = require_function(o);
  const auto x0 = require_point(o);
  const auto grid = o.h_grid.empty() ? default_limit_grid() : HGrid::parse(o.h_grid);
  const auto r = run_limit_study(f, x0, SetSpec::parse(o.set), grid);
  write_report(r.report, format, out);
  SummaryTable summary{"Limit study",
                       {"plateau_rer", "window_low", "window_high", "grid_infimum", "grid_argmin_h",
                        "refined_infimum", "refined_argmin_h", "non_monotone"},
                       {{num(r.plateau), num(kPlateauLow), num(kPlateauHigh), num(r.grid_infimum),
                         num(r.grid_argmin_h), num(r.refined_infimum), num(r.refined_argmin_h),
                         r.non_monotone ? "1" : "0"}}};
  out << '\n';
  write_summary(summary, format, out);
  return kSuccess;
}

int run_reproduce_command(const Options& o, ReportFormat format, std::ostream& out) {
  const auto r = reproduce(o.target);
  write_report(r.report, format, out);
  SummaryTable checks{"Checks against published values", {"check", "computed", "reference", "lower", "upper", "status"}, {}};
  for (const auto& c : r.checks) {
    checks.rows.push_back({c.name, num(c.computed), c.reference, c.informational ? "" : num(c.lower),
                           c.informational ? "" : num(c.upper),
                           c.informational ? "info" : (c.passed() ? "pass" : "FAIL")});
  }
  out << '\n';
  write_summary(checks, format, out);
  return r.passed() ? kSuccess : kReproductionFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Centred simplex gradient and Hessian-diagonal approximation from function values", "cshd"};
  app.set_help_flag("--help", "Print this help message and exit");
  Options o;
  app.add_option("--function", o.function, "Registry function: " + registry_names());
  app.add_option("--point", o.point, "Point of interest, comma separated: \"v1,v2,...\"")
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--set", o.set,
                 "Direction set: cb | rb | cmpb | rmpb | custom:PATH. A custom file holds \"n k\" then n rows "
                 "of k numbers; in the lonely test its entries with |v| <= 1e-14 * radius count as zero")
      ->capture_default_str();
  app.add_option("--h", o.h, "Scale factor h > 0 applied to the direction set");
  app.add_option("--h-grid", o.h_grid, "Geometric grid START:STOP:FACTOR, e.g. 1:1e-4:0.1");
  app.add_option("--f0", o.f0, "Known f(x0); saves one evaluation");
  app.add_flag("--with-bound", o.with_bound, "Require and print the error bound breakdown");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();
  app.add_option("--out", o.out_path, "Write output to PATH instead of standard output");
  app.set_config("--config", "", "File of key = value lines supplying option defaults");

  auto* approx = app.add_subcommand("approx", "Gradient and Hessian-diagonal estimates at one h")->fallthrough();
  auto* sweep = app.add_subcommand("sweep", "Errors over an h-grid with a fitted convergence order")->fallthrough();
  auto* limit = app.add_subcommand("limit-study", "Small-h plateau, infimum and monotonicity of the RER")->fallthrough();
  auto* repro = app.add_subcommand("reproduce", "Rerun a published experiment and compare")->fallthrough();
  repro->add_option("target", o.target, "table1 | table2 | table3 | example41")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3", "example41"}));
  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  // A config line "point = 1,2" arrives as two values joined by newlines.
  std::replace(o.point.begin(), o.point.end(), '\n', ',');

  try {
    const auto format = parse_report_format(o.format);
    std::ofstream file;
    if (!o.out_path.empty()) {
      file.open(o.out_path);
      if (!file) throw ParameterError("cannot open output file '" + o.out_path + "'");
    }
    std::ostream& sink = o.out_path.empty() ? out : file;
    if (approx->parsed()) return run_approx_command(o, format, sink);
    if (sweep->parsed()) return run_sweep_command(o, format, sink);
    if (limit->parsed()) return run_limit_command(o, format, sink);
    return run_reproduce_command(o, format, sink);
  } catch (const BoundInapplicableError& e) {
    err << "error: bound not applicable: " << e.what() << '\n';
    return kBoundInapplicable;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace cshd::cli
