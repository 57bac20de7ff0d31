#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "cshd/centered_calculus.hpp"
#include "cshd/matrix_core.hpp"
#include "cshd/sample_sets.hpp"

namespace cshd {

/// The diagonal-Hessian error bound split into its factors:
///
///   total = ||(W~^T)^+|| * ((k/12) L Delta^2 + 2 sum_i |s^_i^T U s^_i|)
///
/// with W~ = W / Delta^2 and s^_i = s^i / Delta. For lonely S with full row
/// rank the cross term vanishes and the tighter sqrt(k) form applies.
template <typename Scalar>
struct BoundBreakdown {
  Scalar pinv_norm = Scalar(0);
  Scalar lipschitz_term = Scalar(0);  // (k/12) L Delta^2
  Scalar cross_term = Scalar(0);      // 2 sum_i |s^_i^T U s^_i|
  Scalar total = Scalar(0);
  std::optional<Scalar> corollary_total;
};

/// sum_i |s^_i^T U[H] s^_i| over the unit-radius directions s^i / Delta.
/// Independent of any positive rescaling of S.
template <typename Scalar>
Scalar cross_term_sum(const SampleDirections<Scalar>& s, const std::type_identity_t<Matrix<Scalar>>& hessian) {
  if (hessian.rows() != s.dimension() || hessian.cols() != s.dimension()) {
    throw DimensionError("hessian must be " + std::to_string(s.dimension()) + "x" +
                         std::to_string(s.dimension()));
  }
  using std::abs;
  const Matrix<Scalar> upper = matrix_parts(hessian).upper;
  const Matrix<Scalar> unit = s.matrix() / s.radius();
  Scalar sum = Scalar(0);
  for (Index i = 0; i < unit.cols(); ++i) {
    sum += abs(unit.col(i).dot(upper * unit.col(i)));
  }
  return sum;
}

/// Evaluates the bound for S given a Lipschitz constant L of the third
/// derivative on B(x0; Delta) and the exact Hessian at x0.
///
/// Throws BoundInapplicableError if W = S (.) S is not of full row rank.
template <typename Scalar>
BoundBreakdown<Scalar> error_bound(const SampleDirections<Scalar>& s, std::type_identity_t<Scalar> lipschitz,
                                   const std::type_identity_t<Matrix<Scalar>>& hessian) {
  using std::isfinite;
  using std::sqrt;
  if (!(lipschitz >= Scalar(0)) || !isfinite(lipschitz)) {
    throw ParameterError("Lipschitz constant must be finite and nonnegative");
  }
  require_finite(hessian, "hessian");

  const Svd<Scalar> svd(normalized_squared_set(s).transpose());
  if (!svd.full_column_rank()) {
    throw BoundInapplicableError("W = S (.) S does not have full row rank (rank " +
                                 std::to_string(svd.rank()) + " < " +
                                 std::to_string(s.dimension()) + ")");
  }
  const Scalar k = static_cast<Scalar>(s.size());
  const Scalar delta2 = s.radius() * s.radius();

  BoundBreakdown<Scalar> b;
  b.pinv_norm = svd.pseudoinverse_norm();
  b.lipschitz_term = k / Scalar(12) * lipschitz * delta2;
  b.cross_term = Scalar(2) * cross_term_sum(s, hessian);
  b.total = b.pinv_norm * (b.lipschitz_term + b.cross_term);
  if (is_lonely(s) && Svd<Scalar>(s.matrix()).full_row_rank()) {
    b.corollary_total = b.pinv_norm * sqrt(k) / Scalar(12) * lipschitz * delta2;
  }
  return b;
}

template <typename Scalar>
Scalar absolute_error(const Vector<Scalar>& approx, const Vector<Scalar>& truth) {
  if (approx.size() != truth.size()) {
    throw DimensionError("approximation and truth have different dimensions");
  }
  return (approx - truth).norm();
}

/// ||approx - truth|| / ||truth||. Throws ParameterError for a zero truth
/// vector, where only the absolute error is meaningful.
template <typename Scalar>
Scalar relative_error(const Vector<Scalar>& approx, const Vector<Scalar>& truth) {
  const Scalar err = absolute_error(approx, truth);
  const Scalar scale = truth.norm();
  if (scale == Scalar(0)) {
    throw ParameterError("relative error undefined for a zero truth vector; use absolute_error");
  }
  return err / scale;
}

/// Central-difference third-derivative tensor at y, flattened (i, j, k) ->
/// i + n (j + n k). Each entry applies the step-`step` centred first
/// difference once per index, eight evaluations per distinct entry.
template <typename Scalar>
Vector<Scalar> third_derivative_tensor(const Objective<Scalar>& f, const std::type_identity_t<Vector<Scalar>>& y,
                                       std::type_identity_t<Scalar> step) {
  const Index n = y.size();
  Vector<Scalar> t(n * n * n);
  const Scalar denom = Scalar(8) * step * step * step;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      for (Index k = j; k < n; ++k) {
        Scalar acc = Scalar(0);
        for (int a : {-1, 1}) {
          for (int b : {-1, 1}) {
            for (int c : {-1, 1}) {
              Vector<Scalar> p = y;
              p(i) += Scalar(a) * step;
              p(j) += Scalar(b) * step;
              p(k) += Scalar(c) * step;
              acc += Scalar(a * b * c) * detail::checked_evaluation(f, p);
            }
          }
        }
        const Scalar v = acc / denom;
        for (auto [p, q, r] : {std::array{i, j, k}, std::array{i, k, j}, std::array{j, i, k},
                               std::array{j, k, i}, std::array{k, i, j}, std::array{k, j, i}}) {
          t(p + n * (q + n * r)) = v;
        }
      }
    }
  }
  return t;
}

/// Empirical lower estimate of the Lipschitz constant of the third
/// derivative on B(x0; radius): the largest ||T(y) - T(z)|| / ||y - z|| over
/// `samples` point pairs, with T from third_derivative_tensor. The first n
/// pairs are separated along the coordinate axes, the rest along random
/// directions. This is an estimate, never a certificate.
template <typename Scalar>
Scalar lipschitz_oracle(const Objective<Scalar>& f, const std::type_identity_t<Vector<Scalar>>& x0,
                        std::type_identity_t<Scalar> radius,
                        int samples, std::uint64_t seed = 0x5eed) {
  using std::max;
  using std::min;
  using std::pow;
  if (!(radius > Scalar(0))) throw ParameterError("oracle radius must be positive");
  if (samples < 1) throw ParameterError("oracle needs at least one sample");
  const Index n = x0.size();
  const Scalar separation = radius / Scalar(4);
  const Scalar step = min(radius / Scalar(8), Scalar(1e-3) * max(Scalar(1), x0.template lpNorm<Eigen::Infinity>()));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_unit = [&] {
    Vector<Scalar> u(n);
    do {
      for (Index i = 0; i < n; ++i) u(i) = static_cast<Scalar>(gauss(rng));
    } while (u.norm() == Scalar(0));
    return Vector<Scalar>(u / u.norm());
  };

  Scalar best = Scalar(0);
  for (int s = 0; s < samples; ++s) {
    Vector<Scalar> dir = s < n ? Vector<Scalar>(Vector<Scalar>::Unit(n, s)) : random_unit();
    // y uniform in B(x0; radius - separation) keeps z = y + separation * dir in the ball.
    const Scalar r = (radius - separation) *
                     static_cast<Scalar>(pow(unit(rng), 1.0 / static_cast<double>(n)));
    const Vector<Scalar> y = x0 + r * random_unit();
    const Vector<Scalar> z = y + separation * dir;
    const Vector<Scalar> ty = third_derivative_tensor(f, y, step);
    const Vector<Scalar> tz = third_derivative_tensor(f, z, step);
    best = max(best, (ty - tz).norm() / separation);
  }
  return best;
}

/// Least-squares slope of log(error) against log(h).
template <typename Scalar>
Scalar convergence_order(std::span<const Scalar> hs, std::span<const Scalar> errors) {
  using std::log;
  if (hs.size() != errors.size()) throw ParameterError("hs and errors differ in length");
  if (hs.size() < 3) throw ParameterError("convergence order needs at least three points");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > Scalar(0)) || !(errors[i] > Scalar(0))) {
      throw ParameterError("step sizes and errors must be positive");
    }
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ParameterError("step sizes must be strictly decreasing");
  }
  const Index m = static_cast<Index>(hs.size());
  Vector<Scalar> lx(m), ly(m);
  for (Index i = 0; i < m; ++i) {
    lx(i) = log(hs[i]);
    ly(i) = log(errors[i]);
  }
  const Vector<Scalar> cx = lx.array() - lx.mean();
  const Vector<Scalar> cy = ly.array() - ly.mean();
  return cx.dot(cy) / cx.squaredNorm();
}

template <typename Scalar>
Scalar convergence_order(const std::vector<Scalar>& hs, const std::vector<Scalar>& errors) {
  return convergence_order(std::span<const Scalar>(hs), std::span<const Scalar>(errors));
}

/// Hessian by Richardson-extrapolated central differences (fourth order).
/// The default step is eps^(1/6) * max(1, ||x||_inf).
template <typename Scalar>
Matrix<Scalar> finite_difference_hessian(const std::function<Scalar(const Vector<Scalar>&)>& f,
                                         const Vector<Scalar>& x,
                                         std::optional<Scalar> step = std::nullopt) {
  using std::max;
  using std::pow;
  const Index n = x.size();
  const Scalar h = step.value_or(pow(std::numeric_limits<Scalar>::epsilon(), Scalar(1) / Scalar(6)) *
                                 max(Scalar(1), x.template lpNorm<Eigen::Infinity>()));
  const Scalar f0 = f(x);
  auto central = [&](Scalar t) {
    Matrix<Scalar> hess(n, n);
    for (Index i = 0; i < n; ++i) {
      Vector<Scalar> p = x, m = x;
      p(i) += t;
      m(i) -= t;
      hess(i, i) = ((f(p) - f0) + (f(m) - f0)) / (t * t);
      for (Index j = i + 1; j < n; ++j) {
        Vector<Scalar> pp = x, pm = x, mp = x, mm = x;
        pp(i) += t; pp(j) += t;
        pm(i) += t; pm(j) -= t;
        mp(i) -= t; mp(j) += t;
        mm(i) -= t; mm(j) -= t;
        hess(i, j) = hess(j, i) = ((f(pp) - f(pm)) - (f(mp) - f(mm))) / (Scalar(4) * t * t);
      }
    }
    return hess;
  };
  return (Scalar(4) * central(h / Scalar(2)) - central(h)) / Scalar(3);
}

/// Where the exact Hessian comes from when measuring errors: an analytic rule
/// when one is known, otherwise finite_difference_hessian of the function.
template <typename Scalar>
class TruthSource {
 public:
  using Rule = std::function<Scalar(const Vector<Scalar>&)>;
  using HessianRule = std::function<Matrix<Scalar>(const Vector<Scalar>&)>;

  static TruthSource analytic(HessianRule hessian) {
    if (!hessian) throw ParameterError("analytic truth needs a Hessian rule");
    TruthSource t;
    t.hessian_ = std::move(hessian);
    return t;
  }

  static TruthSource finite_difference(Rule f, std::optional<Scalar> step = std::nullopt) {
    if (!f) throw ParameterError("finite-difference truth needs a function");
    TruthSource t;
    t.function_ = std::move(f);
    t.step_ = step;
    return t;
  }

  bool is_analytic() const noexcept { return static_cast<bool>(hessian_); }

  Matrix<Scalar> hessian(const Vector<Scalar>& x) const {
    return hessian_ ? hessian_(x) : finite_difference_hessian(function_, x, step_);
  }

  Vector<Scalar> diag_hessian(const Vector<Scalar>& x) const { return hessian(x).diagonal(); }

 private:
  TruthSource() = default;

  HessianRule hessian_;
  Rule function_;
  std::optional<Scalar> step_;
};

}  // namespace cshd
