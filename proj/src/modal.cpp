#include "modal.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cavspin/errors.hpp"

namespace cavspin::detail {

namespace {

// (exp(z) - 1) computed without cancellation for small |z|.
Complex expm1c(Complex z) {
  const double s = std::sin(0.5 * z.imag());
  const double em1 = std::expm1(z.real());
  return {em1 * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

// (exp(l t) - 1) / l, continuous at l = 0.
Complex phi1(Complex l, double t) {
  const Complex z = l * t;
  if (std::abs(z) < 1e-8) return t * (1.0 + 0.5 * z);
  return expm1c(z) / l;
}

}  // namespace

Eigen::VectorXcd to_modes(const StateVector& y) {
  const int n = static_cast<int>(y.size() / 2);
  Eigen::VectorXcd c(n);
  c[0] = Complex(y[0], y[1]);
  for (int k = 1; k < n; ++k) c[k] = Complex(y[2 * k], -y[2 * k + 1]);
  return c;
}

StateVector from_modes(const Eigen::VectorXcd& c) {
  const int n = static_cast<int>(c.size());
  StateVector y(2 * n);
  y[0] = c[0].real();
  y[1] = c[0].imag();
  for (int k = 1; k < n; ++k) {
    y[2 * k] = c[k].real();
    y[2 * k + 1] = -c[k].imag();
  }
  return y;
}

ModeMoments to_mode_moments(const CovarianceMatrix& gamma) {
  const int n = static_cast<int>(gamma.rows() / 2);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(n, -1.0);
  s[0] = 1.0;
  Eigen::MatrixXd gxx(n, n), gvv(n, n), gvx(n, n), gxv(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      gxx(j, k) = gamma(2 * j, 2 * k);
      gvv(j, k) = s[j] * s[k] * gamma(2 * j + 1, 2 * k + 1);
      gvx(j, k) = s[j] * gamma(2 * j + 1, 2 * k);
      gxv(j, k) = s[k] * gamma(2 * j, 2 * k + 1);
    }
  }
  ModeMoments out;
  out.h = (gxx + gvv).cast<Complex>() + Complex(0.0, 1.0) * (gvx - gxv).cast<Complex>();
  out.p = (gxx - gvv).cast<Complex>() + Complex(0.0, 1.0) * (gvx + gxv).cast<Complex>();
  return out;
}

CovarianceMatrix from_mode_moments(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& p) {
  const int n = static_cast<int>(h.rows());
  CovarianceMatrix gamma(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    const double sj = j == 0 ? 1.0 : -1.0;
    for (int k = 0; k < n; ++k) {
      const double sk = k == 0 ? 1.0 : -1.0;
      const Complex plus = h(j, k) + p(j, k);
      const Complex minus = h(j, k) - p(j, k);
      gamma(2 * j, 2 * k) = 0.5 * plus.real();
      gamma(2 * j + 1, 2 * k + 1) = sj * sk * 0.5 * minus.real();
      gamma(2 * j + 1, 2 * k) = sj * 0.5 * plus.imag();
      gamma(2 * j, 2 * k + 1) = -sk * 0.5 * minus.imag();
    }
  }
  return 0.5 * (gamma + gamma.transpose());
}

ModalPropagator::ModalPropagator(const DriftModel& model) : n_(model.modes()) {
  const Eigen::MatrixXcd k = mode_generator(model);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(k, true);
  if (eig.info() != Eigen::Success) throw NumericalFailure("modal propagation: eigen decomposition failed");
  lambda_ = eig.eigenvalues();
  v_ = eig.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v_);
  v_inv_ = lu.inverse();
  const double recon =
      (v_ * lambda_.asDiagonal() * v_inv_ - k).cwiseAbs().maxCoeff() / std::max(1.0, k.cwiseAbs().maxCoeff());
  if (!(recon < 1e-9)) {
    throw NumericalFailure("modal propagation: generator is too close to defective (reconstruction error " +
                           std::to_string(recon) + "); use the Runge-Kutta propagator");
  }
  const Eigen::VectorXd d = mode_noise(model);
  noise_ = v_inv_ * d.cast<Complex>().asDiagonal() * v_inv_.adjoint();
  field_row_ = v_.row(0).transpose();
  spin_sum_ = v_.bottomRows(n_ - 1).colwise().sum().transpose();
  mean0_ = Eigen::VectorXcd::Zero(n_);
  h0_ = Eigen::MatrixXcd::Zero(n_, n_);
  p0_ = Eigen::MatrixXcd::Zero(n_, n_);
}

void ModalPropagator::set_mean(const StateVector& y0) { mean0_ = v_inv_ * to_modes(y0); }

StateVector ModalPropagator::mean_at(double t) const {
  const Eigen::VectorXcd e = (lambda_ * t).array().exp();
  return from_modes(v_ * (e.array() * mean0_.array()).matrix());
}

void ModalPropagator::set_covariance(const CovarianceMatrix& gamma0) {
  const ModeMoments mm = to_mode_moments(gamma0);
  h0_ = v_inv_ * mm.h * v_inv_.adjoint();
  has_p_ = mm.p.cwiseAbs().maxCoeff() > 0.0;
  p0_ = has_p_ ? Eigen::MatrixXcd(v_inv_ * mm.p * v_inv_.transpose()) : Eigen::MatrixXcd::Zero(n_, n_);
}

Eigen::MatrixXcd ModalPropagator::mode_h_at(double t) const {
  Eigen::MatrixXcd out(n_, n_);
  const Eigen::VectorXcd e = (lambda_ * t).array().exp();
  for (int j = 0; j < n_; ++j) {
    const Complex lj = std::conj(lambda_[j]);
    const Complex ej = std::conj(e[j]);
    for (int i = 0; i < n_; ++i) {
      const Complex l = lambda_[i] + lj;
      const Complex eij = e[i] * ej;
      const Complex growth = std::abs(l) * t > 1e-3 ? (eij - 1.0) / l : phi1(l, t);
      out(i, j) = eij * h0_(i, j) + noise_(i, j) * growth;
    }
  }
  return out;
}

Eigen::MatrixXcd ModalPropagator::mode_p_at(double t) const {
  if (!has_p_) return Eigen::MatrixXcd::Zero(n_, n_);
  const Eigen::VectorXcd e = (lambda_ * t).array().exp();
  return e.asDiagonal() * p0_ * e.asDiagonal();
}

CovarianceMatrix ModalPropagator::covariance_at(double t) const {
  const Eigen::MatrixXcd h = v_ * mode_h_at(t) * v_.adjoint();
  const Eigen::MatrixXcd p = v_ * mode_p_at(t) * v_.transpose();
  return from_mode_moments(h, p);
}

VarianceSnapshot ModalPropagator::variances_at(double t) const {
  const Eigen::MatrixXcd h = mode_h_at(t);
  // a^T H~ conj(a) is the sum of H over the modes selected by a.
  const double h_field = (field_row_.transpose() * h * field_row_.conjugate())(0, 0).real();
  const double h_spin = (spin_sum_.transpose() * h * spin_sum_.conjugate())(0, 0).real();
  double p_field = 0.0;
  double p_spin = 0.0;
  if (has_p_) {
    const Eigen::MatrixXcd p = mode_p_at(t);
    p_field = (field_row_.transpose() * p * field_row_)(0, 0).real();
    p_spin = (spin_sum_.transpose() * p * spin_sum_)(0, 0).real();
  }
  VarianceSnapshot s;
  s.var_x_c = 0.25 * (h_field + p_field);
  s.var_p_c = 0.25 * (h_field - p_field);
  s.var_s_x = 0.25 * (h_spin + p_spin);
  s.var_s_y = 0.25 * (h_spin - p_spin);
  return s;
}

}  // namespace cavspin::detail
