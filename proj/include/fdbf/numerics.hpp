#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fdbf {

// Dense complex types. Scalar is the underlying real type.
template <typename Scalar = double>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row functional produced by pinv_vec; applying it to x gives a scalar.
template <typename Scalar = double>
using CRowVector = Eigen::Matrix<std::complex<Scalar>, 1, Eigen::Dynamic>;

namespace tol {
inline constexpr double kOrtho = 1e-10;
inline constexpr double kEq = 1e-12;
// ||P x||^2 / ||x||^2 below this counts as "x parallel to the projected direction".
inline constexpr double kParallel = 1e-12;
}  // namespace tol

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void require_same_size(Eigen::Index lhs, Eigen::Index rhs, const char* what) {
  if (lhs != rhs) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(lhs) + " vs " +
                         std::to_string(rhs) + ")");
  }
}
}  // namespace detail

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto z = x.derived().coeff(i);
    if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
  }
  return true;
}

/// Hermitian inner product a^H b (conjugates the first argument).
template <typename Scalar>
std::complex<Scalar> inner(const CVector<Scalar>& a, const CVector<Scalar>& b) {
  detail::require_same_size(a.size(), b.size(), "inner");
  return a.dot(b);  // Eigen's dot() conjugates the left operand
}

/// H^H v.
template <typename Scalar>
CVector<Scalar> matvec_adj(const CMatrix<Scalar>& H, const CVector<Scalar>& v) {
  detail::require_same_size(H.rows(), v.size(), "matvec_adj");
  return H.adjoint() * v;
}

/// Moore-Penrose pseudoinverse of a column vector: a^H / ||a||^2, or the zero
/// functional when a = 0.
template <typename Scalar>
CRowVector<Scalar> pinv_vec(const CVector<Scalar>& a) {
  const Scalar n2 = a.squaredNorm();
  if (n2 == Scalar(0)) return CRowVector<Scalar>::Zero(a.size());
  return a.adjoint() / n2;
}

/// (I - a a^#) x: the component of x orthogonal to a. Leaves x untouched when a = 0.
template <typename Scalar>
CVector<Scalar> project_complement(const CVector<Scalar>& a, const CVector<Scalar>& x) {
  detail::require_same_size(a.size(), x.size(), "project_complement");
  const Scalar n2 = a.squaredNorm();
  if (n2 == Scalar(0)) return x;
  return x - a * (a.dot(x) / n2);
}

}  // namespace fdbf
