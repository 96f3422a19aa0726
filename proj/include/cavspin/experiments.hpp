#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cavspin/broadening.hpp"
#include "cavspin/csv.hpp"
#include "cavspin/model.hpp"

namespace cavspin {

enum class Experiment { Decay, Moments, Spectrum, StabilitySweep, Pole };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

struct RunConfig {
  Experiment experiment = Experiment::Decay;
  SystemParams params = SystemParams::symmetric(8.0, 0.0, 2.0);
  BroadeningSpec spec = BroadeningSpec::gaussian(1.2533141373155001);
  int m = kDefaultSubEnsembles;
  double n_spins = kDefaultSpins;
  double p = 1.0;

  double t_max = 5.0;
  int t_samples = 101;
  double alpha = 1.0;   // field kick for decay runs
  double theta = 1e-3;  // spin tilt for moment runs

  double delta_e_min = -30.0;
  double delta_e_max = 30.0;
  int delta_e_samples = 601;

  // Stability sweep grid, inclusive ranges.
  double g_min = 0.5;
  double g_max = 4.0;
  int g_samples = 8;
  double kappa_min = 1.0;
  double kappa_max = 16.0;
  int kappa_samples = 8;

  // Rescale the distribution width so that Gamma = 1 at the given gamma_perp
  // (homogeneous: sets gamma_perp = 1).
  bool normalize_gamma = false;
  // When set, kappa = g_ens^2 / (C Gamma); the kappa1 : kappa2 split is kept.
  std::optional<double> cooperativity;
};

/// Applies normalize_gamma and cooperativity and checks every precondition.
/// Throws InvalidParameter with the offending field in the message.
RunConfig resolve(const RunConfig& config);

struct ExperimentResult {
  Manifest manifest;
  CsvTable table;
};

/// Kick response of the cavity field: simulation against the closed forms.
ExperimentResult run_decay(const RunConfig& config);
/// Tilted inverted spins: means, collective variances and R(t).
ExperimentResult run_moments(const RunConfig& config);
/// Driven reflection and transmission over the delta_e grid.
ExperimentResult run_spectrum(const RunConfig& config);
/// Analytic C < 1 verdict against the discretized model over a (g_ens, kappa) grid.
ExperimentResult run_stability_sweep(const RunConfig& config);
/// Fast and slow roots of the Gaussian pole equation.
ExperimentResult run_pole(const RunConfig& config);

ExperimentResult run_experiment(const RunConfig& config);

/// n points from a to b inclusive (n = 1 gives a).
std::vector<double> linspace(double a, double b, int n);

}  // namespace cavspin
