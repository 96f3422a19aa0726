#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cavspin/model.hpp"
#include "cavspin/ode.hpp"

namespace cavspin {

/// Collective observables at one instant. Variances are Var = gamma/2; the
/// spin sums run over all sub-ensembles. `r` is the relaxation ratio
/// (Var_inf - Var(t)) / (Var_inf - Var(0)) of the collective S_x variance.
struct CollectiveRecord {
  double x_c = 0.0;
  double p_c = 0.0;
  double s_x = 0.0;
  double s_y = 0.0;
  double var_x_c = std::numeric_limits<double>::quiet_NaN();
  double var_p_c = std::numeric_limits<double>::quiet_NaN();
  double var_s_x = std::numeric_limits<double>::quiet_NaN();
  double var_s_y = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();
};

struct MomentSeries {
  std::vector<double> times;
  std::vector<StateVector> means;              // empty for covariance-only runs
  std::vector<CovarianceMatrix> covariances;   // empty for mean-only runs or when not kept
  std::vector<CollectiveRecord> reductions;
  // Set when R(t) could be formed, i.e. an asymptotic S_x variance exists.
  bool relaxation_defined = false;
  double var_s_x_asymptote = std::numeric_limits<double>::quiet_NaN();
  double var_p_c_asymptote = std::numeric_limits<double>::quiet_NaN();
};

enum class Propagator {
  Automatic,   // Runge-Kutta for means and small covariances, modal otherwise
  RungeKutta,  // adaptive Dormand-Prince on the real equations
  Modal,       // exact propagation in the eigenbasis of the mode generator
};

struct PropagationOptions {
  Propagator method = Propagator::Automatic;
  OdeOptions ode{};
  bool keep_covariances = true;
  int runge_kutta_max_dim = 64;  // Automatic switches covariance to modal above this
};

MomentSeries evolve_mean(const DriftModel& model, const StateVector& y0, std::span<const double> times,
                         const PropagationOptions& options = {});

MomentSeries evolve_covariance(const DriftModel& model, const CovarianceMatrix& gamma0, std::span<const double> times,
                               const PropagationOptions& options = {});

/// Means and covariances together, with collective reductions and R(t)
/// filled in. With keep_covariances = false only the reductions are stored.
MomentSeries evolve_moments(const DriftModel& model, const StateVector& y0, const CovarianceMatrix& gamma0,
                            std::span<const double> times, const PropagationOptions& options = {});

/// Solution of drift * gamma + gamma * drift^T + noise = 0.
/// Throws UnstableModel unless the spectral abscissa is negative.
CovarianceMatrix steady_state_covariance(const DriftModel& model);

/// max Re(lambda) over the spectrum of the drift matrix.
double spectral_abscissa(const DriftModel& model);

struct CollectiveAsymptote {
  double var_s_x = 0.0;
  double var_p_c = 0.0;
  bool from_steady_state = false;  // false: plateau of a long propagation
};

/// Asymptotic collective variances. A stable model uses the Lyapunov steady
/// state. A discretized grid without dephasing carries weakly amplified
/// discrete modes (positive spectral abscissa) even when the continuum is
/// stable; there the plateau of the propagated variance at 1/8 and 1/4 of the
/// revival time is used if the two agree to `plateau_tol`. Returns nullopt
/// when neither applies (genuinely growing variances).
std::optional<CollectiveAsymptote> collective_asymptote(const DriftModel& model, const CovarianceMatrix& gamma0,
                                                        double plateau_tol = 1e-6);

/// Fills `series.reductions` from its stored means and covariances and forms
/// R(t) from `collective_asymptote` when one exists.
void collective_reduce(MomentSeries& series, const DriftModel& model);

/// As above, with an explicitly supplied Var(S_x) asymptote (nullopt leaves R undefined).
void collective_reduce(MomentSeries& series, const DriftModel& model, std::optional<double> var_s_x_asymptote);

/// Collective sums of one state; pass nullptr for an absent part.
CollectiveRecord reduce_state(const StateVector* mean, const CovarianceMatrix* gamma);

}  // namespace cavspin
