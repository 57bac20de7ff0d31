#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cshd/centered_calculus.hpp"
#include "cshd/errors.hpp"
#include "support/generators.hpp"
#include "support/polynomial.hpp"

using cshd::build_set;
using cshd::Objective;
using cshd::SampleDirections;
using cshd::SetKind;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double rosenbrock(const VectorXd& y) {
  const double a = 1.0 - y(0);
  const double b = y(1) - y(0) * y(0);
  return a * a + 100.0 * b * b;
}

double max_rel(const VectorXd& a, const VectorXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("constant function has zero differences") {
  const Objective<double> f(2, [](const VectorXd&) { return 3.5; });
  const auto st = cshd::evaluate_stencil(f, VectorXd{{1.0, -1.0}}, build_set(SetKind::RB, 2, 0.1));
  CHECK(st.centered_differences.isZero(0));
  CHECK(st.second_differences.isZero(0));
  CHECK(st.forward_differences().isZero(0));
  CHECK(st.backward_differences().isZero(0));
}

TEST_CASE("squared norm with the coordinate basis") {
  const Objective<double> f(2, [](const VectorXd& y) { return y.squaredNorm(); });
  const auto s = build_set(SetKind::CB, 2, 1.0);
  const auto st = cshd::evaluate_stencil(f, VectorXd::Zero(2), s);
  CHECK(st.second_differences == VectorXd::Constant(2, 2.0));
  CHECK(st.centered_differences.isZero(0));
  CHECK(cshd::cshd(st, s).value == VectorXd::Constant(2, 2.0));
  CHECK(cshd::gcsg(st, s).value.isZero(0));
}

TEST_CASE("Rosenbrock second differences at the first test point") {
  // Along a coordinate axis Rosenbrock is a quartic, so
  // eps_i = H_ii h^2 + 2 f''''_i h^4 / 24 exactly: H = (969.996, 200), f''''_1 = 2400.
  const Objective<double> f(2, rosenbrock);
  const VectorXd x1{{1.1, 1.1 * 1.1 + 1e-5}};
  const double h = 1e-3;
  const auto st = cshd::evaluate_stencil(f, x1, build_set(SetKind::CB, 2, h));
  CHECK(st.second_differences(0) == doctest::Approx(969.996 * h * h + 200.0 * h * h * h * h).epsilon(1e-6));
  CHECK(st.second_differences(1) == doctest::Approx(200.0 * h * h).epsilon(1e-6));
}

TEST_CASE("evaluation accounting") {
  Objective<double> f(3, [](const VectorXd& y) { return y.sum(); });
  const VectorXd x0 = VectorXd::Ones(3);
  const auto s = build_set(SetKind::RMPB, 3, 0.1);

  const auto st = cshd::evaluate_stencil(f, x0, s);
  CHECK(st.evaluations == 2 * 4 + 1);
  CHECK(f.evaluations() == 9);
  CHECK_FALSE(st.f0_supplied);

  f.reset_evaluations();
  const auto known = cshd::evaluate_stencil(f, x0, s, std::optional<double>(3.0));
  CHECK(known.evaluations == 8);
  CHECK(f.evaluations() == 8);
  CHECK(known.f0_supplied);
  CHECK(known.f0 == 3.0);

  f.reset_evaluations();
  const auto est = cshd::centered_estimates(f, x0, s);
  CHECK(f.evaluations() == 9);
  CHECK(est.stencil.evaluations == 9);
}

TEST_CASE("objective checks the dimension before counting") {
  const Objective<double> f(2, [](const VectorXd& y) { return y(0); });
  CHECK_THROWS_AS(f(VectorXd::Zero(3)), cshd::DimensionError);
  CHECK(f.evaluations() == 0);
  CHECK_THROWS_AS(Objective<double>(0, [](const VectorXd&) { return 0.0; }), cshd::ParameterError);
  CHECK_THROWS_AS(Objective<double>(1, nullptr), cshd::ParameterError);
}

TEST_CASE("stencil dimension mismatches are rejected") {
  const Objective<double> f(2, [](const VectorXd& y) { return y(0); });
  CHECK_THROWS_AS(cshd::evaluate_stencil(f, VectorXd::Zero(3), build_set(SetKind::CB, 2, 1.0)),
                  cshd::DimensionError);
  CHECK_THROWS_AS(cshd::evaluate_stencil(f, VectorXd::Zero(2), build_set(SetKind::CB, 3, 1.0)),
                  cshd::DimensionError);
  const auto st = cshd::evaluate_stencil(f, VectorXd::Zero(2), build_set(SetKind::CB, 2, 1.0));
  CHECK_THROWS_AS(cshd::cshd(st, build_set(SetKind::CMPB, 2, 1.0)), cshd::DimensionError);
  CHECK_THROWS_AS(cshd::gcsg(st, build_set(SetKind::CMPB, 2, 1.0)), cshd::DimensionError);
}

TEST_CASE("failing objectives raise StencilError naming the point") {
  const Objective<double> throws(2, [](const VectorXd& y) -> double {
    if (y(0) > 0.5) throw std::domain_error("outside domain");
    return 0.0;
  });
  try {
    cshd::evaluate_stencil(throws, VectorXd::Zero(2), build_set(SetKind::CB, 2, 1.0));
    FAIL("expected StencilError");
  } catch (const cshd::StencilError& e) {
    CHECK(e.point() == "1,0");
    CHECK(std::string(e.what()).find("outside domain") != std::string::npos);
  }

  const Objective<double> nan(1, [](const VectorXd& y) { return y(0) < 0 ? std::log(y(0)) : 0.0; });
  try {
    cshd::evaluate_stencil(nan, VectorXd::Zero(1), build_set(SetKind::CB, 1, 0.5));
    FAIL("expected StencilError");
  } catch (const cshd::StencilError& e) {
    CHECK(e.point() == "-0.5");
  }

  const Objective<double> inf(1, [](const VectorXd&) { return INFINITY; });
  CHECK_THROWS_AS(cshd::evaluate_stencil(inf, VectorXd::Zero(1), build_set(SetKind::CB, 1, 0.5)),
                  cshd::StencilError);
}

TEST_CASE("generalised centred simplex gradient is exact on quadratics") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) {
    const auto p = cshd::test::Polynomial::random(n, 2, rng);
    const Objective<double> f(n, [&p](const VectorXd& y) { return p(y); });
    const VectorXd x0 = cshd::test::random_matrix(n, 1, rng);
    for (auto kind : {SetKind::CB, SetKind::RB, SetKind::CMPB, SetKind::RMPB}) {
      const auto s = build_set(kind, n, 0.7);
      const auto st = cshd::evaluate_stencil(f, x0, s);
      CAPTURE(n);
      CHECK(max_rel(cshd::gcsg(st, s).value, p.gradient(x0)) < 1e-12);
    }
  }
}

TEST_CASE("gradient of Rosenbrock at the second test point with a small coordinate basis") {
  // At (0.9, 0.81) the residual y2 - y1^2 vanishes, so the gradient is (-0.2, 0).
  const Objective<double> f(2, rosenbrock);
  const VectorXd x2{{0.9, 0.81}};
  const auto s = build_set(SetKind::CB, 2, 1e-6);
  const auto g = cshd::gcsg(cshd::evaluate_stencil(f, x2, s), s).value;
  CHECK((g - VectorXd{{-0.2, 0.0}}).norm() <= 1e-6);
}

TEST_CASE("Hessian diagonal is exact on diagonal quadratics for any set with W of full row rank") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 1; n <= 5; ++n) {
    VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = u(rng);
      b(i) = u(rng);
    }
    const Objective<double> f(n, [&](const VectorXd& y) { return b.dot(y) + y.cwiseProduct(y).dot(a); });
    const VectorXd x0 = cshd::test::random_matrix(n, 1, rng);
    for (auto kind : {SetKind::CB, SetKind::RB, SetKind::CMPB, SetKind::RMPB}) {
      const auto s = build_set(kind, n, 0.3);
      const auto d = cshd::cshd(cshd::evaluate_stencil(f, x0, s), s);
      CAPTURE(n);
      CHECK_FALSE(d.rank_deficient);
      CHECK(max_rel(d.value, 2.0 * a) < 1e-12);
    }
  }
}

TEST_CASE("bilinear function has a zero Hessian diagonal estimate on lonely sets") {
  const double alpha = 2.0;
  const Objective<double> f(2, [&](const VectorXd& y) { return alpha * y(0) * y(1); });
  const VectorXd x0{{0.3, -1.7}};
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const SampleDirections<double> s(cshd::test::random_lonely_full_row_rank(2, 2 + trial % 3, rng));
    CHECK(cshd::cshd(cshd::evaluate_stencil(f, x0, s), s).value.norm() <= 1e-9);
  }
  const auto cb = build_set(SetKind::CB, 2, 1e-2);
  CHECK(cshd::cshd(cshd::evaluate_stencil(f, x0, cb), cb).value.norm() <= 1e-9);
}

TEST_CASE("cubic polynomials are reproduced exactly with lonely sets") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim(1, 5), extra(0, 3);
  std::uniform_real_distribution<double> scale(0.05, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = dim(rng);
    const auto p = cshd::test::Polynomial::random(n, 3, rng);
    const Objective<double> f(n, [&p](const VectorXd& y) { return p(y); });
    const VectorXd x0 = cshd::test::random_matrix(n, 1, rng);
    const SampleDirections<double> s(scale(rng) * cshd::test::random_lonely_full_row_rank(n, n + extra(rng), rng));
    const VectorXd truth = p.hessian(x0).diagonal();
    const VectorXd d = cshd::cshd(cshd::evaluate_stencil(f, x0, s), s).value;
    CAPTURE(trial);
    CHECK((d - truth).norm() <= 1e-8 * std::max(1.0, truth.norm()));
  }
}

TEST_CASE("rank-deficient W is flagged") {
  const Objective<double> f(2, [](const VectorXd& y) { return y.squaredNorm(); });
  const SampleDirections<double> s(MatrixXd{{1.0, 1.0}, {1.0, -1.0}});
  const auto d = cshd::cshd(cshd::evaluate_stencil(f, VectorXd::Zero(2), s), s);
  CHECK(d.rank_deficient);
  // Minimum-norm solution of d1 + d2 = 4 in both rows.
  CHECK((d.value - VectorXd{{2.0, 2.0}}).norm() < 1e-12);
}

TEST_CASE("estimates are unchanged by reflecting the set") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = cshd::test::Polynomial::random(3, 4, rng);
    const Objective<double> f(3, [&p](const VectorXd& y) { return p(y); });
    const VectorXd x0 = cshd::test::random_matrix(3, 1, rng);
    const SampleDirections<double> s(0.1 * cshd::test::random_matrix(3, 5, rng));
    const auto a = cshd::centered_estimates(f, x0, s);
    const auto b = cshd::centered_estimates(f, x0, s.reflected());
    CHECK(max_rel(a.gradient.value, b.gradient.value) < 1e-10);
    CHECK(max_rel(a.diag_hessian.value, b.diag_hessian.value) < 1e-10);
  }
}

TEST_CASE("stencil over concatenated sets is the concatenation of stencils") {
  std::mt19937_64 rng(41);
  const auto p = cshd::test::Polynomial::random(3, 4, rng);
  const Objective<double> f(3, [&p](const VectorXd& y) { return p(y); });
  const VectorXd x0 = cshd::test::random_matrix(3, 1, rng);
  const MatrixXd a = cshd::test::random_matrix(3, 2, rng);
  const MatrixXd b = cshd::test::random_matrix(3, 3, rng);
  MatrixXd ab(3, 5);
  ab << a, b;
  const auto sa = cshd::evaluate_stencil(f, x0, SampleDirections<double>(a));
  const auto sb = cshd::evaluate_stencil(f, x0, SampleDirections<double>(b));
  const auto sab = cshd::evaluate_stencil(f, x0, SampleDirections<double>(ab));
  CHECK(sab.second_differences.head(2) == sa.second_differences);
  CHECK(sab.second_differences.tail(3) == sb.second_differences);
  CHECK(sab.centered_differences.head(2) == sa.centered_differences);
  CHECK(sab.centered_differences.tail(3) == sb.centered_differences);
}

TEST_CASE("diagonal model evaluation") {
  const VectorXd x0{{1.0, 2.0}};
  const VectorXd g{{1.0, -1.0}};
  const VectorXd d{{2.0, 4.0}};
  CHECK(cshd::diag_model_eval<double>(x0, x0, 5.0, g, d) == 5.0);
  // 5 + (1 * 1 - 1 * 2) + 0.5 * (2 * 1 + 4 * 4) = 13
  CHECK(cshd::diag_model_eval<double>(VectorXd{{2.0, 4.0}}, x0, 5.0, g, d) == doctest::Approx(13.0));
  CHECK_THROWS_AS(cshd::diag_model_eval<double>(VectorXd::Zero(3), x0, 5.0, g, d), cshd::ParameterError);
  CHECK_THROWS_AS(cshd::diag_model_eval<double>(x0, x0, 5.0, VectorXd::Zero(1), d), cshd::ParameterError);
}

TEST_CASE("diagonal model interpolates f on a square lonely stencil") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const auto p = cshd::test::Polynomial::random(n, 4, rng);
    const Objective<double> f(n, [&p](const VectorXd& y) { return p(y); });
    const VectorXd x0 = cshd::test::random_matrix(n, 1, rng);
    const SampleDirections<double> s(0.2 * cshd::test::random_lonely_full_row_rank(n, n, rng));
    const auto est = cshd::centered_estimates(f, x0, s);
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        const VectorXd y = x0 + sign * s.column(i);
        CHECK(cshd::diag_model_eval<double>(y, x0, est.stencil.f0, est.gradient.value, est.diag_hessian.value) ==
              doctest::Approx(p(y)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("diagonal model reproduces separable quadratics everywhere") {
  const Objective<double> f(2, [](const VectorXd& y) { return 1.0 + y(0) - 3.0 * y(1) + 2.0 * y(0) * y(0); });
  const VectorXd x0{{0.5, 0.5}};
  const auto s = build_set(SetKind::RMPB, 2, 0.25);
  const auto est = cshd::centered_estimates(f, x0, s);
  for (const VectorXd& y : {VectorXd{{3.0, -2.0}}, VectorXd{{-1.0, 0.0}}}) {
    CHECK(cshd::diag_model_eval<double>(y, x0, est.stencil.f0, est.gradient.value, est.diag_hessian.value) ==
          doctest::Approx(f(y)).epsilon(1e-12));
  }
}
