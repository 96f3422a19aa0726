#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cavspin {

using Complex = std::complex<double>;

enum class Family { Homogeneous, Lorentzian, Gaussian };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Spin-frequency distribution f(Delta). `width` is the FWHM for a
/// Lorentzian, the standard deviation for a Gaussian, and 0 for a point mass.
struct BroadeningSpec {
  Family family = Family::Homogeneous;
  double width = 0.0;

  static BroadeningSpec homogeneous() { return {Family::Homogeneous, 0.0}; }
  static BroadeningSpec lorentzian(double fwhm) { return {Family::Lorentzian, fwhm}; }
  static BroadeningSpec gaussian(double sigma) { return {Family::Gaussian, sigma}; }

  void validate() const;
};

struct SubEnsemble {
  double detuning = 0.0;  // Delta_m
  double coupling = 0.0;  // per-spin g_m
  double spins = 0.0;     // N_m, real valued
};

/// Discretized ensemble. Entries are ordered by ascending detuning and come in
/// mirror pairs (Delta, -Delta) with identical coupling and spin count.
struct SubEnsembleGrid {
  std::vector<SubEnsemble> entries;
  double total_spins = 0.0;
  double g_ens = 0.0;
  // Node spacing when the detunings form a uniform grid; drives the revival guard.
  std::optional<double> uniform_spacing;

  int size() const { return static_cast<int>(entries.size()); }
  Eigen::VectorXd detunings() const;
  Eigen::VectorXd couplings() const;
  Eigen::VectorXd spin_counts() const;

  /// Throws InvalidParameter if the sums or the mirror symmetry are off.
  void check_invariants(double rel_tol = 1e-12) const;
};

/// Pointwise density f(Delta). Not defined for the homogeneous point mass.
double density(const BroadeningSpec& spec, double delta);

/// Gamma with 1/Gamma = \int f(Delta) dDelta / (gamma_perp + i Delta).
double characteristic_width(const BroadeningSpec& spec, double gamma_perp);

/// \int f(Delta) dDelta / (gamma_perp + i (Delta - probe)) in closed form.
/// Equals 1/Gamma at probe = 0.
Complex response_integral(const BroadeningSpec& spec, double gamma_perp, double probe);

/// Splits the distribution into `m` sub-ensembles of total N spins whose
/// collective coupling is g_ens. Gaussian: uniform nodes on +-6 sigma with
/// trapezoid weights. Lorentzian: equal-mass quantile nodes. Homogeneous
/// always yields a single entry, regardless of `m`.
SubEnsembleGrid discretize(const BroadeningSpec& spec, int m, double g_ens, double total_spins);

/// Default number of sub-ensembles for broadened families.
inline constexpr int kDefaultSubEnsembles = 601;
/// Default spin number; normalized observables do not depend on it.
inline constexpr double kDefaultSpins = 1e6;
/// Half-span of the Gaussian grid in units of sigma.
inline constexpr double kGaussianSpan = 6.0;

/// Gamma of the discrete grid: g_ens^2 / Re sum_m g_m^2 N_m / (gamma_perp + i Delta_m).
double discrete_characteristic_width(const SubEnsembleGrid& grid, double gamma_perp);

/// 2 pi / (smallest detuning spacing). Infinite for a single entry.
double revival_time(const SubEnsembleGrid& grid);

}  // namespace cavspin
