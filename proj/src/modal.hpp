#pragma once

// Exact propagation of the linear moment equations in the eigenbasis of the
// complex mode generator K (see mode_generator). With c = V c~, the means,
// the Hermitian second moments H = E[c c^H] and the pseudo moments
// P = E[c c^T] all evolve entrywise:
//   c~_i(t)  = exp(l_i t) c~_i(0)
//   H~_ij(t) = exp(L_ij t) H~_ij(0) + D~_ij (exp(L_ij t) - 1) / L_ij,  L_ij = l_i + conj(l_j)
//   P~_ij(t) = exp((l_i + l_j) t) P~_ij(0)
// The real covariance is recovered blockwise from H and P.

#include <Eigen/Core>

#include "cavspin/model.hpp"

namespace cavspin::detail {

// Complex amplitudes c_k = y_{2k} + i s_k y_{2k+1}, s_0 = +1 and s_k = -1 for spins.
Eigen::VectorXcd to_modes(const StateVector& y);
StateVector from_modes(const Eigen::VectorXcd& c);

struct ModeMoments {
  Eigen::MatrixXcd h;  // E[c c^H]
  Eigen::MatrixXcd p;  // E[c c^T]
};
ModeMoments to_mode_moments(const CovarianceMatrix& gamma);
CovarianceMatrix from_mode_moments(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& p);

struct VarianceSnapshot {
  double var_x_c = 0.0;
  double var_p_c = 0.0;
  double var_s_x = 0.0;
  double var_s_y = 0.0;
};

class ModalPropagator {
 public:
  explicit ModalPropagator(const DriftModel& model);

  const Eigen::VectorXcd& eigenvalues() const { return lambda_; }

  void set_mean(const StateVector& y0);
  StateVector mean_at(double t) const;

  void set_covariance(const CovarianceMatrix& gamma0);
  CovarianceMatrix covariance_at(double t) const;
  VarianceSnapshot variances_at(double t) const;

 private:
  Eigen::MatrixXcd mode_h_at(double t) const;
  Eigen::MatrixXcd mode_p_at(double t) const;

  int n_ = 0;
  Eigen::VectorXcd lambda_;
  Eigen::MatrixXcd v_;
  Eigen::MatrixXcd v_inv_;
  Eigen::MatrixXcd noise_;  // V^-1 D V^-H
  Eigen::VectorXcd field_row_;  // row 0 of V
  Eigen::VectorXcd spin_sum_;   // V^T u, u = indicator of the spin modes
  Eigen::VectorXcd mean0_;
  Eigen::MatrixXcd h0_;
  Eigen::MatrixXcd p0_;
  bool has_p_ = false;
};

}  // namespace cavspin::detail
