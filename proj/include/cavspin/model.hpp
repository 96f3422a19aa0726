#pragma once

#include <utility>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cavspin/broadening.hpp"

namespace cavspin {

/// Rates in one shared angular-frequency unit.
struct SystemParams {
  double kappa = 1.0;   // total cavity field decay, kappa1 + kappa2
  double kappa1 = 0.5;  // input mirror
  double kappa2 = 0.5;  // output mirror
  double gamma_perp = 0.0;
  double g_ens = 0.0;
  double delta_cs = 0.0;  // cavity minus central spin frequency

  /// kappa split evenly between the two mirrors.
  static SystemParams symmetric(double kappa, double gamma_perp, double g_ens, double delta_cs = 0.0);

  void validate() const;
};

using StateVector = Eigen::VectorXd;
using CovarianceMatrix = Eigen::MatrixXd;

// Layout of the real state vector: (X_c, P_c, S_x^(1), S_y^(1), ..., S_x^(M), S_y^(M)).
inline constexpr int kFieldX = 0;
inline constexpr int kFieldP = 1;
inline int spin_x_index(int m) { return 2 + 2 * m; }
inline int spin_y_index(int m) { return 3 + 2 * m; }

/// Linearized spin-cavity generator: d<y>/dt = drift * <y>, and
/// d(gamma)/dt = drift * gamma + gamma * drift^T + diag(noise).
struct DriftModel {
  SystemParams params;
  SubEnsembleGrid grid;
  double inversion = 1.0;  // p: +1 inverted, -1 ground state
  Eigen::SparseMatrix<double> drift;
  Eigen::VectorXd noise;  // diagonal of the zero-temperature noise matrix

  int dim() const { return static_cast<int>(noise.size()); }
  int modes() const { return dim() / 2; }
  Eigen::MatrixXd dense_drift() const { return Eigen::MatrixXd(drift); }
  Eigen::MatrixXd noise_matrix() const { return noise.asDiagonal(); }
};

DriftModel build_drift_matrix(const SystemParams& params, const SubEnsembleGrid& grid, double p);

/// The same dynamics written for the complex amplitudes
/// c = (X_c + i P_c, S_x^(1) - i S_y^(1), ...): dc/dt = K c. K has one row and
/// column per mode, so it is (M+1) x (M+1).
Eigen::MatrixXcd mode_generator(const DriftModel& model);

/// Noise of the complex amplitudes, E[f f^dagger] per unit time (diagonal).
Eigen::VectorXd mode_noise(const DriftModel& model);

/// Second moments x = (<dX^2>, <dP^2>, <dSx^2>, <dSy^2>, <dSx dP>, <dSy dX>) of a
/// homogeneous, resonant, fully inverted ensemble obey dx/dt = Q x + r.
struct HomogeneousMomentSystem {
  Eigen::Matrix<double, 6, 6> q;
  Eigen::Matrix<double, 6, 1> r;
};

/// Uses the mean coupling g_bar = g_ens / sqrt(N). Rejects delta_cs != 0.
HomogeneousMomentSystem build_homogeneous_q(const SystemParams& params, double total_spins);

enum class InitialKind { FieldKick, TiltedSpin, Vacuum };

/// Mean and covariance of the standard initial states. The covariance is the
/// coherent-state one in every case: Var(X_c) = Var(P_c) = 1/2 and
/// Var(S_x^(m)) = Var(S_y^(m)) = N_m.
/// FieldKick displaces <a_c> to alpha (X_c = sqrt(2) alpha); TiltedSpin sets
/// S_x^(m) = theta N_m.
std::pair<StateVector, CovarianceMatrix> initial_state(InitialKind kind, const SubEnsembleGrid& grid,
                                                       double alpha = 0.0, double theta = 0.0);

}  // namespace cavspin
