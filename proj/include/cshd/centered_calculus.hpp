#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>

#include "cshd/matrix_core.hpp"
#include "cshd/sample_sets.hpp"

namespace cshd {

/// A scalar function on R^n that counts how many times it has been called.
/// The counter is atomic so the count stays exact if the rule is invoked
/// from several threads.
template <typename Scalar>
class Objective {
 public:
  using Rule = std::function<Scalar(const Vector<Scalar>&)>;

  Objective(Index dimension, Rule rule) : dimension_(dimension), rule_(std::move(rule)) {
    if (dimension_ < 1) throw ParameterError("objective dimension must be positive");
    if (!rule_) throw ParameterError("objective rule is empty");
  }

  Objective(const Objective&) = delete;
  Objective& operator=(const Objective&) = delete;

  Scalar operator()(const Vector<Scalar>& y) const {
    if (y.size() != dimension_) {
      throw DimensionError("objective expects a point of dimension " + std::to_string(dimension_) +
                           ", got " + std::to_string(y.size()));
    }
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return rule_(y);
  }

  Index dimension() const noexcept { return dimension_; }
  std::uint64_t evaluations() const noexcept { return evaluations_.load(std::memory_order_relaxed); }
  void reset_evaluations() noexcept { evaluations_.store(0, std::memory_order_relaxed); }

 private:
  Index dimension_;
  Rule rule_;
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

/// Function values on the centred stencil x0 +- s^i and the two difference
/// vectors built from them.
template <typename Scalar>
struct EvaluatedStencil {
  Vector<Scalar> x0;
  Scalar f0 = Scalar(0);
  Vector<Scalar> plus_values;           // f(x0 + s^i)
  Vector<Scalar> minus_values;          // f(x0 - s^i)
  Vector<Scalar> centered_differences;  // (f(x0 + s^i) - f(x0 - s^i)) / 2
  Vector<Scalar> second_differences;    // f(x0 + s^i) + f(x0 - s^i) - 2 f(x0)
  std::uint64_t evaluations = 0;
  bool f0_supplied = false;

  Index size() const noexcept { return plus_values.size(); }

  /// f(x0 + s^i) - f(x0)
  Vector<Scalar> forward_differences() const { return plus_values.array() - f0; }
  /// f(x0 - s^i) - f(x0)
  Vector<Scalar> backward_differences() const { return minus_values.array() - f0; }
};

namespace detail {

template <typename Scalar>
Scalar checked_evaluation(const Objective<Scalar>& f, const Vector<Scalar>& y) {
  Scalar value;
  try {
    value = f(y);
  } catch (const StencilError&) {
    throw;
  } catch (const std::exception& e) {
    throw StencilError(std::string("objective evaluation failed: ") + e.what(), format_vector(y));
  }
  using std::isfinite;
  if (!isfinite(value)) {
    throw StencilError("objective returned a non-finite value", format_vector(y));
  }
  return value;
}

}  // namespace detail

/// Evaluates f at x0 and at x0 +- s^i for every column of S.
///
/// When `known_f0` is given it is used as f(x0) and only 2k evaluations are
/// made; otherwise f(x0) is evaluated once, for 2k + 1 in total.
template <typename Scalar>
EvaluatedStencil<Scalar> evaluate_stencil(const Objective<Scalar>& f,
                                          const std::type_identity_t<Vector<Scalar>>& x0,
                                          const SampleDirections<Scalar>& s,
                                          std::optional<std::type_identity_t<Scalar>> known_f0 = std::nullopt) {
  if (x0.size() != s.dimension() || x0.size() != f.dimension()) {
    throw DimensionError("point, sample set and objective dimensions disagree (" +
                         std::to_string(x0.size()) + ", " + std::to_string(s.dimension()) + ", " +
                         std::to_string(f.dimension()) + ")");
  }
  require_finite(x0, "point of interest");

  const Index k = s.size();
  EvaluatedStencil<Scalar> st;
  st.x0 = x0;
  st.plus_values.resize(k);
  st.minus_values.resize(k);

  std::uint64_t used = 0;
  if (known_f0) {
    using std::isfinite;
    if (!isfinite(*known_f0)) throw ParameterError("supplied f(x0) is not finite");
    st.f0 = *known_f0;
    st.f0_supplied = true;
  } else {
    st.f0 = detail::checked_evaluation(f, x0);
    ++used;
  }
  for (Index i = 0; i < k; ++i) {
    st.plus_values(i) = detail::checked_evaluation<Scalar>(f, x0 + s.column(i));
    st.minus_values(i) = detail::checked_evaluation<Scalar>(f, x0 - s.column(i));
    used += 2;
  }
  st.evaluations = used;

  st.centered_differences = (st.plus_values - st.minus_values) / Scalar(2);
  // (f+ - f0) + (f- - f0)
  st.second_differences = (st.plus_values.array() - st.f0) + (st.minus_values.array() - st.f0);
  return st;
}

template <typename Scalar>
struct GradientEstimate {
  Vector<Scalar> value;
  Vector<Scalar> x0;
  Matrix<Scalar> directions;
};

template <typename Scalar>
struct DiagHessianEstimate {
  Vector<Scalar> value;
  Vector<Scalar> x0;
  Matrix<Scalar> directions;
  /// W = S (.) S lacks full row rank; value is then the minimum-norm
  /// least-squares solution of W^T d = eps.
  bool rank_deficient = false;
};

namespace detail {

template <typename Scalar>
void require_matching(const EvaluatedStencil<Scalar>& st, const SampleDirections<Scalar>& s) {
  if (st.size() != s.size() || st.x0.size() != s.dimension()) {
    throw DimensionError("stencil was not built over this sample set");
  }
}

}  // namespace detail

/// Generalised centred simplex gradient (S^T)^+ delta_c.
template <typename Scalar>
GradientEstimate<Scalar> gcsg(const EvaluatedStencil<Scalar>& st, const SampleDirections<Scalar>& s) {
  detail::require_matching(st, s);
  const Svd<Scalar> svd(s.matrix().transpose());
  return {svd.pseudoinverse() * st.centered_differences, st.x0, s.matrix()};
}

/// Centred simplex Hessian diagonal (W^T)^+ eps with W = S (.) S.
template <typename Scalar>
DiagHessianEstimate<Scalar> cshd(const EvaluatedStencil<Scalar>& st, const SampleDirections<Scalar>& s) {
  detail::require_matching(st, s);
  const Matrix<Scalar> w = squared_set(s);
  const Svd<Scalar> svd(w.transpose());
  DiagHessianEstimate<Scalar> est{svd.pseudoinverse() * st.second_differences, st.x0, s.matrix(), false};
  est.rank_deficient = !svd.full_column_rank();
  return est;
}

/// The diagonal quadratic model f0 + g^T (x - x0) + 1/2 (x - x0)^T Diag(d) (x - x0).
template <typename Scalar>
Scalar diag_model_eval(const Vector<Scalar>& x, const Vector<Scalar>& x0, Scalar f0,
                       const Vector<Scalar>& g, const Vector<Scalar>& d) {
  const Index n = x0.size();
  if (x.size() != n || g.size() != n || d.size() != n) {
    throw ParameterError("diag_model_eval: dimensions of x, x0, g and d must agree");
  }
  const Vector<Scalar> step = x - x0;
  return f0 + g.dot(step) + Scalar(0.5) * step.cwiseProduct(step).dot(d);
}

/// Everything one stencil evaluation buys: the gradient and the Hessian diagonal.
template <typename Scalar>
struct CenteredEstimates {
  EvaluatedStencil<Scalar> stencil;
  GradientEstimate<Scalar> gradient;
  DiagHessianEstimate<Scalar> diag_hessian;
};

template <typename Scalar>
CenteredEstimates<Scalar> centered_estimates(const Objective<Scalar>& f,
                                             const std::type_identity_t<Vector<Scalar>>& x0,
                                             const SampleDirections<Scalar>& s,
                                             std::optional<std::type_identity_t<Scalar>> known_f0 = std::nullopt) {
  auto st = evaluate_stencil(f, x0, s, known_f0);
  auto g = gcsg(st, s);
  auto d = cshd(st, s);
  return {std::move(st), std::move(g), std::move(d)};
}

}  // namespace cshd
