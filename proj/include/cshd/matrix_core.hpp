#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "cshd/errors.hpp"

namespace cshd {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Throws ParameterError if any coefficient of `a` is NaN or infinite.
template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const std::string& what) {
  if (!a.allFinite()) {
    throw ParameterError(what + " contains non-finite entries");
  }
}

/// Comma-separated coefficients with 17 significant digits.
template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v, char separator = ',') {
  std::string out;
  char buf[32];
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += separator;
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(v(i)));
    out += buf;
  }
  return out;
}

/// Singular value decomposition shared by the pseudoinverse, the l2 operator
/// norm and the numerical rank so that one factorisation serves all three.
///
/// Singular values sigma_i <= max(rows, cols) * sigma_max * eps are treated
/// as zero.
template <typename Scalar>
class Svd {
 public:
  template <typename Derived>
  explicit Svd(const Eigen::MatrixBase<Derived>& a)
      : rows_(a.rows()), cols_(a.cols()) {
    require_finite(a, "matrix");
    if (a.size() == 0) {
      return;
    }
    svd_.compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Scalar largest = svd_.singularValues().size() > 0 ? svd_.singularValues()(0) : Scalar(0);
    cutoff_ = static_cast<Scalar>(std::max(rows_, cols_)) * largest *
              std::numeric_limits<Scalar>::epsilon();
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  const Vector<Scalar>& singular_values() const { return svd_.singularValues(); }

  /// Rank cutoff; singular values at or below it count as zero.
  Scalar threshold() const noexcept { return cutoff_; }

  /// Largest singular value, i.e. the induced l2 norm.
  Scalar norm() const {
    return singular_values().size() > 0 ? singular_values()(0) : Scalar(0);
  }

  Index rank() const {
    Index r = 0;
    for (Index i = 0; i < singular_values().size(); ++i) {
      if (singular_values()(i) > cutoff_) ++r;
    }
    return r;
  }

  bool full_row_rank() const { return rank() == rows_; }
  bool full_column_rank() const { return rank() == cols_; }

  /// Moore-Penrose pseudoinverse (cols x rows).
  Matrix<Scalar> pseudoinverse() const {
    if (rows_ == 0 || cols_ == 0) {
      return Matrix<Scalar>::Zero(cols_, rows_);
    }
    Vector<Scalar> inv = singular_values();
    for (Index i = 0; i < inv.size(); ++i) {
      inv(i) = inv(i) > cutoff_ ? Scalar(1) / inv(i) : Scalar(0);
    }
    return svd_.matrixV() * inv.asDiagonal() * svd_.matrixU().transpose();
  }

  /// l2 norm of the pseudoinverse: 1 / (smallest retained singular value).
  Scalar pseudoinverse_norm() const {
    const Index r = rank();
    return r == 0 ? Scalar(0) : Scalar(1) / singular_values()(r - 1);
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Scalar cutoff_ = Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd_;
};

template <typename Derived>
Svd(const Eigen::MatrixBase<Derived>&) -> Svd<typename Derived::Scalar>;

template <typename Derived>
Matrix<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& a) {
  return Svd(a).pseudoinverse();
}

template <typename Derived>
typename Derived::Scalar operator_norm_l2(const Eigen::MatrixBase<Derived>& a) {
  return Svd(a).norm();
}

template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& a) {
  return Svd(a).rank();
}

/// Componentwise product. Throws DimensionError on shape mismatch.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> hadamard(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hadamard: operands are " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  return a.cwiseProduct(b);
}

/// The pieces of a square matrix M used by the diagonal model and its bound.
template <typename Scalar>
struct MatrixParts {
  Vector<Scalar> diag;           // diagonal entries as a vector
  Matrix<Scalar> diag_matrix;    // Diag[M]
  Matrix<Scalar> upper;          // U[M], strictly upper triangular part
  Matrix<Scalar> off_diagonal;   // N[M] = M - Diag[M]
};

template <typename Derived>
MatrixParts<typename Derived::Scalar> matrix_parts(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) {
    throw DimensionError("matrix_parts: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
  MatrixParts<Scalar> parts;
  parts.diag = m.diagonal();
  parts.diag_matrix = parts.diag.asDiagonal();
  parts.upper = m.template triangularView<Eigen::StrictlyUpper>();
  parts.off_diagonal = m - parts.diag_matrix;
  return parts;
}

}  // namespace cshd
