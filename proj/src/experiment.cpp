#include "cshd/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace cshd {

namespace {

double parse_real(std::string_view text, const char* what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw ParameterError(std::string("invalid ") + what + " '" + s + "'");
  }
  return v;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

SetSpec SetSpec::standard(SetKind kind) {
  if (kind == SetKind::Custom) throw ParameterError("custom sets need a matrix");
  return {kind, std::nullopt, std::string(to_string(kind))};
}

SetSpec SetSpec::from_matrix(Eigen::MatrixXd m, std::string label) {
  // Validate eagerly: nonzero, distinct, finite columns.
  SampleDirections<double> check(m);
  return {SetKind::Custom, std::move(m), std::move(label)};
}

SetSpec SetSpec::parse(std::string_view text) {
  constexpr std::string_view prefix = "custom:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string path(text.substr(prefix.size()));
    if (path.empty()) throw ParameterError("custom set needs a file path: custom:PATH");
    return from_matrix(read_direction_matrix(path), std::string(text));
  }
  return standard(parse_set_kind(text));
}

SampleDirections<double> SetSpec::directions(Index n, double h) const {
  if (kind != SetKind::Custom) return build_set<double>(kind, n, h);
  if (custom->rows() != n) {
    throw DimensionError("custom set has " + std::to_string(custom->rows()) + " rows, function has dimension " +
                         std::to_string(n));
  }
  return SampleDirections<double>(*custom).scaled(h);
}

HGrid HGrid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw ParameterError("h-grid must be START:STOP:FACTOR, got '" + std::string(text) + "'");
  }
  HGrid g{parse_real(text.substr(0, a), "h-grid start"), parse_real(text.substr(a + 1, b - a - 1), "h-grid stop"),
          parse_real(text.substr(b + 1), "h-grid factor")};
  if (!(g.stop > 0.0) || !(g.start >= g.stop)) {
    throw ParameterError("h-grid needs START >= STOP > 0");
  }
  if (!(g.factor > 0.0 && g.factor < 1.0)) {
    throw ParameterError("h-grid FACTOR must lie in (0, 1)");
  }
  return g;
}

std::vector<double> HGrid::values() const {
  // start / (1/factor)^j keeps decimal grids such as 1, 0.1, 0.01 exact.
  const double divisor = 1.0 / factor;
  std::vector<double> hs;
  for (int j = 0;; ++j) {
    const double h = start / std::pow(divisor, j);
    if (h < stop * (1.0 - 1e-12)) break;
    hs.push_back(h);
    if (hs.size() > 10000) throw ParameterError("h-grid has too many points");
  }
  return hs;
}

Eigen::VectorXd parse_point(std::string_view text) {
  std::vector<double> coords;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    coords.push_back(parse_real(token, "point coordinate"));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return Eigen::Map<Eigen::VectorXd>(coords.data(), static_cast<Index>(coords.size()));
}

ApproxResult run_approx(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set, double h,
                        const ApproxOptions& options) {
  if (x0.size() != f.dimension) {
    throw DimensionError(f.name + " expects a point of dimension " + std::to_string(f.dimension) + ", got " +
                         std::to_string(x0.size()));
  }
  const auto s = set.directions(f.dimension, h);
  const auto objective = f.objective();

  ApproxResult r{centered_estimates(objective, x0, s, options.f0), f.gradient(x0), f.diag_hessian(x0), {}, true,
                 0.0, {}};
  const Eigen::VectorXd& d = r.estimates.diag_hessian.value;
  const Eigen::VectorXd& g = r.estimates.gradient.value;

  r.row.function = f.name;
  r.row.point = x0;
  r.row.set = set.label;
  r.row.h = h;
  r.row.delta_s = s.radius();
  r.row.abs_err_diag = absolute_error(d, r.true_diag);
  if (r.true_diag.norm() > 0.0) r.row.rer_diag = relative_error(d, r.true_diag);
  if (r.true_gradient.norm() > 0.0) r.row.rer_grad = relative_error(g, r.true_gradient);
  r.row.evals = objective.evaluations();

  if (f.has_lipschitz_bound()) {
    r.lipschitz = f.lipschitz_bound(x0, s.radius());
  } else {
    const auto probe = f.objective();
    r.lipschitz = lipschitz_oracle(probe, x0, s.radius(), 16);
    r.lipschitz_certified = false;
  }
  if (!std::isfinite(r.lipschitz)) {
    if (options.with_bound) {
      throw ParameterError("Lipschitz bound for " + f.name + " overflows on a ball of radius " +
                           format_number(s.radius()));
    }
    return r;
  }
  try {
    r.bound = error_bound(s, r.lipschitz, f.hessian(x0));
    r.row.bound_total = r.bound->total;
    r.row.bound_cross = r.bound->cross_term;
  } catch (const BoundInapplicableError&) {
    if (options.with_bound) throw;
  }
  return r;
}

std::vector<std::size_t> truncation_rows(const std::vector<double>& hs, const std::vector<double>& abs_errors,
                                         double truth_norm) {
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * truth_norm;
  std::vector<std::size_t> above;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (abs_errors[i] > floor) above.push_back(i);
  }
  if (abs_errors.empty()) return above;
  const auto best = static_cast<std::size_t>(
      std::min_element(abs_errors.begin(), abs_errors.end()) - abs_errors.begin());
  std::vector<std::size_t> window;
  for (auto i : above) {
    if (hs[i] >= hs[best]) window.push_back(i);
  }
  return window.size() >= 3 ? window : above;
}

SweepResult run_sweep(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set,
                      const HGrid& grid) {
  SweepResult out;
  std::vector<double> hs;
  std::vector<double> errs;
  double truth_norm = 0.0;
  for (double h : grid.values()) {
    auto r = run_approx(f, x0, set, h);
    truth_norm = r.true_diag.norm();
    hs.push_back(h);
    errs.push_back(r.row.abs_err_diag);
    out.report.rows.push_back(std::move(r.row));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (errs[i] < errs[best]) best = i;
  }
  out.best_h = hs[best];
  out.best_error = out.report.rows[best].rer_diag.value_or(errs[best]);

  const auto rows = truncation_rows(hs, errs, truth_norm);
  if (rows.size() >= 3) {
    std::vector<double> fh;
    std::vector<double> fe;
    for (auto i : rows) {
      fh.push_back(hs[i]);
      fe.push_back(errs[i]);
    }
    out.order = convergence_order(fh, fe);
    out.fit_hs = std::move(fh);
  }
  out.report.sort();
  return out;
}

HGrid default_limit_grid() { return {10.0, 1e-8, std::pow(10.0, -0.25)}; }

LimitStudy run_limit_study(const RegistryFunction& f, const Eigen::VectorXd& x0, const SetSpec& set,
                           const HGrid& grid) {
  if (!(f.diag_hessian(x0).norm() > 0.0)) {
    throw ParameterError("limit study needs a nonzero Hessian diagonal at the point");
  }
  auto rer_at = [&](double h) { return *run_approx(f, x0, set, h).row.rer_diag; };

  LimitStudy out;
  std::vector<double> hs;
  std::vector<double> rers;
  for (double h : grid.values()) {
    auto r = run_approx(f, x0, set, h);
    hs.push_back(h);
    rers.push_back(*r.row.rer_diag);
    out.report.rows.push_back(std::move(r.row));
  }

  std::vector<double> window;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (hs[i] >= kPlateauLow * (1.0 - 1e-9) && hs[i] <= kPlateauHigh * (1.0 + 1e-9)) window.push_back(rers[i]);
  }
  if (window.empty()) throw ParameterError("h-grid has no points in the plateau window [1e-4, 1e-2]");
  std::sort(window.begin(), window.end());
  const std::size_t mid = window.size() / 2;
  out.plateau = window.size() % 2 ? window[mid] : 0.5 * (window[mid - 1] + window[mid]);

  const auto best = static_cast<std::size_t>(std::min_element(rers.begin(), rers.end()) - rers.begin());
  out.grid_infimum = rers[best];
  out.grid_argmin_h = hs[best];
  std::optional<std::size_t> safe;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (hs[i] >= kPlateauLow * (1.0 - 1e-9) && (!safe || rers[i] < rers[*safe])) safe = i;
  }
  const std::size_t trunc = *safe;  // the plateau window is nonempty, so this is set
  out.refined_infimum = rers[trunc];
  out.refined_argmin_h = hs[trunc];
  if (trunc > 0 && trunc + 1 < hs.size() && hs[trunc + 1] >= kPlateauLow * (1.0 - 1e-9)) {
    const auto [t, value] = boost::math::tools::brent_find_minima(
        [&](double log_h) { return rer_at(std::exp(log_h)); }, std::log(hs[trunc + 1]), std::log(hs[trunc - 1]),
        40);
    if (value < out.refined_infimum) {
      out.refined_infimum = value;
      out.refined_argmin_h = std::exp(t);
    }
  }
  for (std::size_t i = best + 1; i < hs.size(); ++i) {
    if (rers[i] > kNonMonotoneFactor * out.grid_infimum) out.non_monotone = true;
  }
  out.report.sort();
  return out;
}

Eigen::VectorXd rosenbrock_point_x1() { return Eigen::VectorXd{{1.1, 1.1 * 1.1 + 1e-5}}; }
Eigen::VectorXd rosenbrock_point_x2() { return Eigen::VectorXd{{0.9, 0.81}}; }
Eigen::VectorXd expprod_point() { return Eigen::VectorXd{{3.0, 2.0, 1.0}}; }

bool Reproduction::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

namespace {

Check within_relative(std::string name, double computed, double reference, double tol) {
  return {std::move(name), computed, short_number(reference) + " +-" + short_number(100 * tol) + "%",
          reference * (1 - tol), reference * (1 + tol)};
}

Check within_factor(std::string name, double computed, double reference, double factor) {
  return {std::move(name), computed, short_number(reference) + " x/" + short_number(factor), reference / factor,
          reference * factor};
}

Check within_band(std::string name, double computed, double lower, double upper, double reference) {
  return {std::move(name), computed,
          short_number(reference) + " in [" + short_number(lower) + ", " + short_number(upper) + "]", lower, upper};
}

Check below(std::string name, double computed, double limit, std::string reference) {
  return {std::move(name), computed, std::move(reference) + " (< " + short_number(limit) + ")", 0.0, limit};
}

Check informational(std::string name, double computed, std::string reference) {
  Check c{std::move(name), computed, std::move(reference), 0.0, 0.0};
  c.informational = true;
  return c;
}

void append(ExperimentReport& into, ExperimentReport from) {
  into.rows.insert(into.rows.end(), std::make_move_iterator(from.rows.begin()),
                   std::make_move_iterator(from.rows.end()));
}

Reproduction table1() {
  Reproduction rep{"table1", {}, {}};
  const auto& f = find_function("rosenbrock2");
  struct Case {
    SetKind kind;
    double x1_ref;
    double x2_ref;
  };
  const Case cases[] = {{SetKind::CB, 2.02e-7, 1.18e-9},
                        {SetKind::RB, 3.14e-1, 3.74e-1},
                        {SetKind::CMPB, 4.19e-1, 4.99e-1},
                        {SetKind::RMPB, 1.78e-7, 3.39e-9}};
  for (const auto& c : cases) {
    const auto set = SetSpec::standard(c.kind);
    auto r1 = run_approx(f, rosenbrock_point_x1(), set, 1e-3);
    auto r2 = run_approx(f, rosenbrock_point_x2(), set, 1e-6);
    const std::string label(to_string(c.kind));
    rep.checks.push_back(within_relative("x1 " + label + " h=1e-3 RER", *r1.row.rer_diag, c.x1_ref, 0.05));
    // The two smallest entries are round-off dominated.
    if (c.kind == SetKind::CB || c.kind == SetKind::RMPB) {
      rep.checks.push_back(within_factor("x2 " + label + " h=1e-6 RER", *r2.row.rer_diag, c.x2_ref, 3.0));
    } else {
      rep.checks.push_back(within_relative("x2 " + label + " h=1e-6 RER", *r2.row.rer_diag, c.x2_ref, 0.05));
    }
    rep.report.rows.push_back(std::move(r1.row));
    rep.report.rows.push_back(std::move(r2.row));
  }
  rep.report.sort();
  return rep;
}

Reproduction table2() {
  Reproduction rep{"table2", {}, {}};
  const auto& f = find_function("rosenbrock2");
  struct Case {
    const char* point_name;
    Eigen::VectorXd point;
    SetKind kind;
    double limit;
    double infimum;
  };
  const Case cases[] = {
      {"x1", rosenbrock_point_x1(), SetKind::CB, 0.0, 0.0},
      {"x2", rosenbrock_point_x2(), SetKind::CB, 0.0, 0.0},
      {"x1", rosenbrock_point_x1(), SetKind::RB, 3.14e-1, 3.14e-1},
      {"x2", rosenbrock_point_x2(), SetKind::RB, 3.74e-1, 3.74e-1},
      {"x1", rosenbrock_point_x1(), SetKind::CMPB, 4.19e-1, 2.96e-1},
      {"x2", rosenbrock_point_x2(), SetKind::CMPB, 5.00e-1, 3.53e-1},
      {"x1", rosenbrock_point_x1(), SetKind::RMPB, std::numeric_limits<double>::infinity(), 5.71e-10},
      {"x2", rosenbrock_point_x2(), SetKind::RMPB, 4.65e-10, 4.65e-10},
  };
  for (const auto& c : cases) {
    auto study = run_limit_study(f, c.point, SetSpec::standard(c.kind));
    const std::string prefix = std::string(c.point_name) + " " + std::string(to_string(c.kind)) + " ";
    switch (c.kind) {
      case SetKind::CB:
        rep.checks.push_back(below(prefix + "limit (plateau)", study.plateau, 1e-5, "0"));
        rep.checks.push_back(below(prefix + "infimum", study.refined_infimum, 1e-5, "0"));
        break;
      case SetKind::RB:
      case SetKind::CMPB:
        rep.checks.push_back(within_relative(prefix + "limit (plateau)", study.plateau, c.limit, 0.05));
        rep.checks.push_back(within_relative(prefix + "infimum", study.refined_infimum, c.infimum, 0.05));
        break;
      case SetKind::RMPB:
        if (std::isinf(c.limit)) {
          rep.checks.push_back({prefix + "non-monotone below argmin", study.non_monotone ? 1.0 : 0.0,
                                "+inf limit (flag = 1)", 1.0, 1.0});
        } else {
          rep.checks.push_back(
              informational(prefix + "limit (plateau)", study.plateau, short_number(c.limit) + " (exact arithmetic)"));
        }
        rep.checks.push_back(
            informational(prefix + "infimum", study.refined_infimum, short_number(c.infimum) + " (exact arithmetic)"));
        break;
      case SetKind::Custom:
        break;
    }
    append(rep.report, std::move(study.report));
  }
  rep.report.sort();
  return rep;
}

Reproduction table3() {
  Reproduction rep{"table3", {}, {}};
  const auto& f = find_function("expprod3");
  const auto x0 = expprod_point();
  struct Row {
    double h;
    double rmpb;
    double cb;
  };
  const Row rows[] = {{1.0, 5.93e1, 9.79},
                      {1e-1, 1.31e-1, 2.93e-2},
                      {1e-2, 1.33e-1, 2.90e-4},
                      {1e-3, 1.33e-1, 2.90e-6},
                      {1e-4, 1.33e-1, 2.95e-8}};
  const auto rmpb = SetSpec::standard(SetKind::RMPB);
  const auto cb = SetSpec::standard(SetKind::CB);
  for (const auto& row : rows) {
    auto a = run_approx(f, x0, rmpb, row.h);
    auto b = run_approx(f, x0, cb, row.h);
    const std::string h = "h=" + short_number(row.h);
    if (row.h <= 1e-2) {
      rep.checks.push_back(within_band("rmpb " + h + " RER", *a.row.rer_diag, 1.25e-1, 1.40e-1, row.rmpb));
    } else {
      rep.checks.push_back(within_relative("rmpb " + h + " RER", *a.row.rer_diag, row.rmpb, 0.10));
    }
    rep.checks.push_back(within_relative("cb " + h + " RER", *b.row.rer_diag, row.cb, 0.10));
    rep.report.rows.push_back(std::move(a.row));
    rep.report.rows.push_back(std::move(b.row));
  }
  const auto lim_rmpb = run_limit_study(f, x0, rmpb);
  const auto lim_cb = run_limit_study(f, x0, cb);
  rep.checks.push_back(within_band("rmpb limit (plateau)", lim_rmpb.plateau, 1.25e-1, 1.40e-1, 1.33e-1));
  rep.checks.push_back(below("cb limit (plateau)", lim_cb.plateau, 1e-5, "0"));
  rep.report.sort();
  return rep;
}

Reproduction example41() {
  Reproduction rep{"example41", {}, {}};
  const auto& f = find_function("expprod3");
  const auto x0 = expprod_point();

  const double r3 = std::sqrt(3.0);
  Eigen::MatrixXd displayed(3, 4);
  displayed << 5 * r3 / 9, -r3 / 9, -r3 / 9, -r3 / 3,  //
      -r3 / 9, 5 * r3 / 9, -r3 / 9, -r3 / 3,           //
      -r3 / 9, -r3 / 9, 5 * r3 / 9, -r3 / 3;
  const double deviation = (build_set<double>(SetKind::RMPB, 3, 1.0).matrix() - displayed).cwiseAbs().maxCoeff();
  rep.checks.push_back(below("RMPB(3) matrix max deviation", deviation, 1e-14, "0"));

  auto study = run_limit_study(f, x0, SetSpec::standard(SetKind::RMPB));
  rep.checks.push_back(within_band("limit (plateau)", study.plateau, 1.25e-1, 1.40e-1, 1.33e-1));
  rep.checks.push_back(within_relative("minimum RER", study.refined_infimum, 1.30e-1, 0.05));
  rep.checks.push_back(within_relative("argmin h", study.refined_argmin_h, 0.0883, 0.05));
  rep.report = std::move(study.report);
  return rep;
}

}  // namespace

Reproduction reproduce(std::string_view target) {
  if (target == "table1") return table1();
  if (target == "table2") return table2();
  if (target == "table3") return table3();
  if (target == "example41") return example41();
  throw ParameterError("unknown reproduction target '" + std::string(target) +
                       "' (expected table1, table2, table3, example41)");
}

}  // namespace cshd
