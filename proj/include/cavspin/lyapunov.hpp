#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cavspin/errors.hpp"

namespace cavspin {

/// Solves A X + X A^H + Q = 0 by Bartels-Stewart on the complex Schur form
/// A = U T U^H. Works for real or complex scalars; for real input the result
/// is the real part (the imaginary part is rounding noise). Throws
/// NumericalFailure when lambda_i + conj(lambda_j) vanishes for some pair.
/// Q is expected to be Hermitian; the returned X is symmetrized.
template <typename DerivedA, typename DerivedQ>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_continuous_lyapunov(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedA::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw InvalidParameter("solve_continuous_lyapunov: A and Q must be square and of equal size");
  }
  const CMatrix ac = a.template cast<std::complex<Real>>();
  Eigen::ComplexSchur<CMatrix> schur(ac, true);
  if (schur.info() != Eigen::Success) throw NumericalFailure("solve_continuous_lyapunov: Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();
  const CMatrix f = u.adjoint() * q.template cast<std::complex<Real>>() * u;

  // Column j of  T Y + Y T^H = -F  couples only to columns l > j.
  CMatrix y = CMatrix::Zero(n, n);
  const Real tiny = Eigen::NumTraits<Real>::epsilon() * (t.cwiseAbs().maxCoeff() + Real(1));
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    CVector rhs = -f.col(j);
    if (j + 1 < n) rhs.noalias() -= y.rightCols(n - j - 1) * t.row(j).tail(n - j - 1).adjoint();
    // Back substitution with (T + conj(t_jj) I), column oriented.
    const std::complex<Real> shift = std::conj(t(j, j));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const std::complex<Real> pivot = t(i, i) + shift;
      if (std::abs(pivot) < tiny) {
        throw NumericalFailure(
            "solve_continuous_lyapunov: spectrum of A meets its mirror image, no unique solution");
      }
      rhs[i] /= pivot;
      if (i > 0) rhs.head(i).noalias() -= t.col(i).head(i) * rhs[i];
    }
    y.col(j) = rhs;
  }
  const CMatrix x = u * y * u.adjoint();
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    return (x + x.adjoint()) / Real(2);
  } else {
    const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> xr = x.real();
    return (xr + xr.transpose()) / Real(2);
  }
}

}  // namespace cavspin
