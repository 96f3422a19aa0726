#pragma once

#include "cavspin/broadening.hpp"
#include "cavspin/model.hpp"

namespace cavspin {

struct StabilityReport {
  double gamma = 0.0;    // characteristic width Gamma
  double kappa_c = 0.0;  // g_ens^2 / Gamma
  double c = 0.0;        // g_ens^2 / (kappa Gamma)
  bool stable = false;   // C < 1
  Complex lambda_plus;
  Complex lambda_minus;
  // The eigenvalue pair is exact for homogeneous and Lorentzian broadening and
  // only indicative for a Gaussian.
  bool eigenvalues_exact = true;
};

StabilityReport stability_report(const SystemParams& params, const BroadeningSpec& spec);

/// Roots of (lambda + kappa)(lambda + Gamma) = g_ens^2, larger real part first.
/// lambda_+ is formed from the root product so its sign is that of C - 1 exactly.
std::pair<Complex, Complex> mean_value_eigenvalues(double kappa, double gamma, double g_ens);

/// <a_c(t)> after a kick <a_c> -> alpha, for Lorentzian (or homogeneous)
/// broadening of width Gamma on resonance. Zero for t < 0.
Complex lorentzian_kick_response(double alpha, double kappa, double gamma, double g_ens, double t);

struct PoleResult {
  Complex lambda;
  double residual = 0.0;  // |F(lambda)|
  int iterations = 0;
  Complex derivative;     // F'(lambda); alpha / F' is the residue of the kick response
};

/// F(lambda) = lambda + kappa - sqrt(pi/2) g_ens^2 / sigma * w(i (lambda + gamma_perp) / (sqrt(2) sigma)).
Complex gaussian_pole_function(const SystemParams& params, double sigma, Complex lambda);

/// Root of the Gaussian pole function by damped Newton from `seed`, with a
/// secant step when the derivative is unusable. Converged when
/// |F| <= 1e-10 kappa; throws NumericalFailure with the iterate trace after
/// 100 iterations.
PoleResult gaussian_pole(const SystemParams& params, double sigma, Complex seed);

/// The rightmost root, which sets the long-time decay or growth rate. Seeds
/// from the threshold expansion, the Lorentzian-like lambda_+ at the same
/// Gamma, and a few points along the real axis; throws NumericalFailure if
/// none converges.
PoleResult gaussian_slow_pole(const SystemParams& params, double sigma);

/// The fast root, seeded from lambda_- of the homogeneous problem with Gamma = gamma_perp.
PoleResult gaussian_fast_pole(const SystemParams& params, double sigma);

/// Slow-pole rate close to threshold from the small-argument expansion of w.
double threshold_rate_approx(double kappa, double kappa_c, double sigma, double g_ens);

/// alpha exp(-kappa t) + alpha g^2 / kappa^2 exp(-sigma^2 t^2 / 2 - gamma_perp t).
double weak_coupling_response(double alpha, const SystemParams& params, double sigma, double t);

/// Steady second moments of the homogeneous resonant inverted system (Var, not gamma).
struct HomogeneousSteadyMoments {
  double var_x_c = 0.0;
  double var_p_c = 0.0;
  double var_s_x = 0.0;  // of the effective collective spin
  double var_s_y = 0.0;
  double cov_s_x_p_c = 0.0;
  double cov_s_y_x_c = 0.0;
};

/// Throws UnstableModel for C >= 1.
HomogeneousSteadyMoments steady_state_moments_hom(double kappa, double gamma, double g_ens, double total_spins);

}  // namespace cavspin
