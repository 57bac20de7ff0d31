#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cshd/matrix_core.hpp"

namespace cshd {

/// The direction families used in the experiments. Custom wraps a user matrix.
enum class SetKind { CB, RB, CMPB, RMPB, Custom };

std::string_view to_string(SetKind kind) noexcept;

/// Parses "cb", "rb", "cmpb" or "rmpb" (case-insensitive).
SetKind parse_set_kind(std::string_view name);

/// Relative magnitude below which an entry of a custom matrix counts as zero
/// in the lonely test, measured against the radius of the set.
inline constexpr double kLonelyZeroTolerance = 1e-14;

/// A matrix S whose columns are the nonzero, pairwise distinct directions
/// added to and subtracted from the point of interest. The radius
/// max_i ||s^i|| is computed once at construction.
template <typename Scalar>
class SampleDirections {
 public:
  explicit SampleDirections(Matrix<Scalar> directions, SetKind kind = SetKind::Custom)
      : directions_(std::move(directions)), kind_(kind) {
    if (directions_.rows() < 1 || directions_.cols() < 1) {
      throw ParameterError("sample set must have at least one row and one column");
    }
    require_finite(directions_, "sample set");
    for (Index i = 0; i < directions_.cols(); ++i) {
      if (directions_.col(i).isZero(0)) {
        throw ParameterError("sample set column " + std::to_string(i) + " is zero");
      }
      for (Index j = 0; j < i; ++j) {
        if (directions_.col(i) == directions_.col(j)) {
          throw ParameterError("sample set columns " + std::to_string(j) + " and " +
                               std::to_string(i) + " are identical");
        }
      }
    }
    radius_ = directions_.colwise().norm().maxCoeff();
  }

  const Matrix<Scalar>& matrix() const noexcept { return directions_; }
  Index dimension() const noexcept { return directions_.rows(); }
  Index size() const noexcept { return directions_.cols(); }
  SetKind kind() const noexcept { return kind_; }
  Scalar radius() const noexcept { return radius_; }

  auto column(Index i) const { return directions_.col(i); }

  SampleDirections scaled(Scalar h) const {
    if (!(h > Scalar(0)) || !std::isfinite(static_cast<double>(h))) {
      throw ParameterError("scale factor h must be positive and finite");
    }
    return SampleDirections(directions_ * h, kind_);
  }

  /// The reflected set -S, tagged Custom.
  SampleDirections reflected() const { return SampleDirections(-directions_, SetKind::Custom); }

 private:
  Matrix<Scalar> directions_;
  SetKind kind_;
  Scalar radius_ = Scalar(0);
};

/// sqrt((n+1)/n) * (Id - (1/n)(1 - sqrt(1/(n+1))) 11^T); unit-norm columns.
template <typename Scalar = double>
Matrix<Scalar> regular_basis(Index n) {
  using std::sqrt;
  if (n < 1) throw ParameterError("dimension n must be positive");
  const Scalar nn = static_cast<Scalar>(n);
  const Scalar shift = (Scalar(1) - sqrt(Scalar(1) / (nn + Scalar(1)))) / nn;
  Matrix<Scalar> rb = Matrix<Scalar>::Identity(n, n) - Matrix<Scalar>::Constant(n, n, shift);
  return sqrt((nn + Scalar(1)) / nn) * rb;
}

/// h times one of the standard direction families in dimension n.
template <typename Scalar = double>
SampleDirections<Scalar> build_set(SetKind kind, Index n, Scalar h) {
  if (n < 1) throw ParameterError("dimension n must be positive");
  if (!(h > Scalar(0)) || !std::isfinite(static_cast<double>(h))) {
    throw ParameterError("scale factor h must be positive and finite");
  }
  Matrix<Scalar> s;
  switch (kind) {
    case SetKind::CB:
      s = Matrix<Scalar>::Identity(n, n);
      break;
    case SetKind::RB:
      s = regular_basis<Scalar>(n);
      break;
    case SetKind::CMPB:
      s.resize(n, n + 1);
      s << Matrix<Scalar>::Identity(n, n), -Vector<Scalar>::Ones(n);
      break;
    case SetKind::RMPB: {
      const Matrix<Scalar> rb = regular_basis<Scalar>(n);
      s.resize(n, n + 1);
      s << rb, -rb.rowwise().sum();
      break;
    }
    case SetKind::Custom:
      throw ParameterError("custom sets are built from an explicit matrix");
  }
  return SampleDirections<Scalar>(s * h, kind);
}

template <typename Scalar>
Scalar radius(const SampleDirections<Scalar>& s) {
  return s.radius();
}

/// True iff every column has exactly one nonzero entry. Custom matrices treat
/// entries with magnitude <= kLonelyZeroTolerance * radius as zero.
template <typename Scalar>
bool is_lonely(const SampleDirections<Scalar>& s) {
  using std::abs;
  const Scalar zero = s.kind() == SetKind::Custom
                          ? static_cast<Scalar>(kLonelyZeroTolerance) * s.radius()
                          : Scalar(0);
  for (Index j = 0; j < s.size(); ++j) {
    Index nonzeros = 0;
    for (Index i = 0; i < s.dimension(); ++i) {
      if (abs(s.matrix()(i, j)) > zero) ++nonzeros;
    }
    if (nonzeros != 1) return false;
  }
  return true;
}

/// W = S (.) S.
template <typename Scalar>
Matrix<Scalar> squared_set(const SampleDirections<Scalar>& s) {
  return hadamard(s.matrix(), s.matrix());
}

/// W / radius^2, the radius-free form of W.
template <typename Scalar>
Matrix<Scalar> normalized_squared_set(const SampleDirections<Scalar>& s) {
  return squared_set(s) / (s.radius() * s.radius());
}

/// Reads a direction matrix: first line "n k", then n rows of k numbers.
Matrix<double> parse_direction_matrix(std::istream& in);
Matrix<double> read_direction_matrix(const std::filesystem::path& path);

}  // namespace cshd
