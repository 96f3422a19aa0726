#include "cavspin/experiments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cavspin/analytics.hpp"
#include "cavspin/dynamics.hpp"
#include "cavspin/errors.hpp"
#include "cavspin/probing.hpp"

namespace cavspin {

namespace {

using Cell = std::optional<double>;

Cell cell(double v) { return std::isfinite(v) ? Cell(v) : std::nullopt; }

std::optional<double> try_gamma(const RunConfig& c) {
  try {
    return characteristic_width(c.spec, c.params.gamma_perp);
  } catch (const InvalidParameter&) {
    return std::nullopt;
  }
}

// sigma with Gamma(sigma, gamma_perp) = 1; Gamma grows monotonically with sigma.
double gaussian_sigma_for_unit_gamma(double gamma_perp) {
  if (!(gamma_perp < 1.0)) {
    throw InvalidParameter("normalize-gamma: Gaussian Gamma exceeds gamma_perp, so gamma_perp must be < 1");
  }
  if (gamma_perp == 0.0) return std::sqrt(std::numbers::pi / 2.0);
  double lo = 1e-8;
  double hi = 1e4;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (characteristic_width(BroadeningSpec::gaussian(mid), gamma_perp) < 1.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

SubEnsembleGrid make_grid(const RunConfig& c) {
  return discretize(c.spec, c.spec.family == Family::Homogeneous ? 1 : c.m, c.params.g_ens, c.n_spins);
}

Manifest base_manifest(const RunConfig& c) {
  Manifest m;
  m.set("experiment", std::string(to_string(c.experiment)));
  m.set("family", std::string(to_string(c.spec.family)));
  m.set("width", c.spec.width);
  m.set("m", c.spec.family == Family::Homogeneous ? 1 : c.m);
  if (c.spec.family == Family::Gaussian) {
    m.set("grid", "uniform trapezoid");
    m.set("grid_half_span_sigma", kGaussianSpan);
  } else if (c.spec.family == Family::Lorentzian) {
    m.set("grid", "equal-mass quantiles");
  }
  m.set("n_spins", c.n_spins);
  m.set("kappa", c.params.kappa);
  m.set("kappa1", c.params.kappa1);
  m.set("kappa2", c.params.kappa2);
  m.set("gamma_perp", c.params.gamma_perp);
  m.set("g_ens", c.params.g_ens);
  m.set("delta_cs", c.params.delta_cs);
  m.set("p", c.p);
  m.set("normalize_gamma", c.normalize_gamma);
  if (c.cooperativity) m.set("cooperativity_target", *c.cooperativity);
  if (const auto g = try_gamma(c)) {
    m.set("Gamma", *g);
    m.set("C", c.params.g_ens * c.params.g_ens / (c.params.kappa * *g));
  }
  return m;
}

void add_time_grid(Manifest& m, const RunConfig& c, const PropagationOptions& opt) {
  m.set("t_max", c.t_max);
  m.set("t_samples", c.t_samples);
  m.set("ode_rtol", opt.ode.rtol);
  m.set("ode_atol", opt.ode.atol);
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Decay:
      return "decay";
    case Experiment::Moments:
      return "moments";
    case Experiment::Spectrum:
      return "spectrum";
    case Experiment::StabilitySweep:
      return "stability-sweep";
    case Experiment::Pole:
      return "pole";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Decay, Experiment::Moments, Experiment::Spectrum, Experiment::StabilitySweep,
                       Experiment::Pole}) {
    if (name == to_string(e)) return e;
  }
  throw InvalidParameter("unknown experiment '" + std::string(name) + "'");
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw InvalidParameter("linspace needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  if (n > 1) v.back() = b;
  return v;
}

RunConfig resolve(const RunConfig& config) {
  RunConfig c = config;
  if (c.normalize_gamma) {
    switch (c.spec.family) {
      case Family::Homogeneous:
        c.params.gamma_perp = 1.0;
        break;
      case Family::Lorentzian:
        require(c.params.gamma_perp < 1.0, "normalize-gamma: Lorentzian needs gamma_perp < 1");
        c.spec.width = 2.0 * (1.0 - c.params.gamma_perp);
        break;
      case Family::Gaussian:
        c.spec.width = gaussian_sigma_for_unit_gamma(c.params.gamma_perp);
        break;
    }
  }
  c.spec.validate();
  if (c.cooperativity) {
    require(*c.cooperativity > 0.0, "cooperativity must be positive");
    require(c.params.g_ens > 0.0, "cooperativity needs g_ens > 0");
    const double gamma = characteristic_width(c.spec, c.params.gamma_perp);
    const double kappa = c.params.g_ens * c.params.g_ens / (*c.cooperativity * gamma);
    const double share = c.params.kappa > 0.0 ? c.params.kappa1 / c.params.kappa : 0.5;
    c.params.kappa = kappa;
    c.params.kappa1 = share * kappa;
    c.params.kappa2 = kappa - c.params.kappa1;
  }
  c.params.validate();
  require(c.n_spins > 0.0 && std::isfinite(c.n_spins), "n-spins must be positive");
  if (c.spec.family != Family::Homogeneous) {
    require(c.m >= 3 && c.m % 2 == 1, "m must be odd and >= 3 for a broadened ensemble");
  }
  switch (c.experiment) {
    case Experiment::Decay:
    case Experiment::Moments:
      require(c.p == 1.0 || c.p == -1.0, "p must be +1 or -1 for time evolution");
      require(c.t_max > 0.0, "t-max must be positive");
      require(c.t_samples >= 2, "t-samples must be at least 2");
      break;
    case Experiment::Spectrum:
      require(c.p >= -1.0 && c.p <= 1.0 && c.p != 0.0, "p must lie in [-1, 1] and be nonzero");
      require(c.params.delta_cs == 0.0, "spectrum assumes delta-cs = 0");
      require(c.delta_e_samples >= 1 && c.delta_e_min <= c.delta_e_max, "delta-e grid is empty");
      break;
    case Experiment::StabilitySweep:
      require(c.p == 1.0 || c.p == -1.0, "p must be +1 or -1");
      require(c.g_samples >= 1 && c.kappa_samples >= 1, "sweep grid is empty");
      require(c.g_min >= 0.0 && c.g_min <= c.g_max, "g range is invalid");
      require(c.kappa_min > 0.0 && c.kappa_min <= c.kappa_max, "kappa range is invalid");
      require(c.t_max > 0.0, "t-max must be positive");
      break;
    case Experiment::Pole:
      require(c.spec.family == Family::Gaussian, "pole needs the gaussian family");
      break;
  }
  return c;
}

ExperimentResult run_decay(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const SubEnsembleGrid grid = make_grid(c);
  const DriftModel model = build_drift_matrix(c.params, grid, c.p);
  const auto [y0, gamma0] = initial_state(InitialKind::FieldKick, grid, c.alpha);
  const std::vector<double> times = linspace(0.0, c.t_max, c.t_samples);
  PropagationOptions opt;
  const MomentSeries s = evolve_mean(model, y0, times, opt);

  ExperimentResult out;
  out.manifest = base_manifest(c);
  add_time_grid(out.manifest, c, opt);
  out.manifest.set("alpha", c.alpha);

  const auto gamma = try_gamma(c);
  const bool resonant = c.params.delta_cs == 0.0;
  const bool gaussian = c.spec.family == Family::Gaussian;
  std::optional<PoleResult> pole;
  if (gaussian && resonant && c.p == 1.0) {
    try {
      pole = gaussian_slow_pole(c.params, c.spec.width);
      const Complex residue = c.alpha / pole->derivative;
      out.table.summary.emplace_back("pole_lambda_re", format_number(pole->lambda.real()));
      out.table.summary.emplace_back("pole_lambda_im", format_number(pole->lambda.imag()));
      out.table.summary.emplace_back("pole_residue_re", format_number(residue.real()));
      out.table.summary.emplace_back("pole_residue_im", format_number(residue.imag()));
    } catch (const NumericalFailure& e) {
      out.table.summary.emplace_back("pole_status", "no root found");
    }
  }

  out.table.columns = {"t", "X_c_sim", "X_c_lorentzian_analytic", "X_c_weak_coupling", "X_c_pole_tail"};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    Cell lor;
    Cell weak;
    Cell tail;
    if (resonant && gamma && c.p == 1.0) {
      lor = std::numbers::sqrt2 * lorentzian_kick_response(c.alpha, c.params.kappa, *gamma, c.params.g_ens, t).real();
    }
    if (gaussian && c.p == 1.0) weak = std::numbers::sqrt2 * weak_coupling_response(c.alpha, c.params, c.spec.width, t);
    if (pole) tail = std::numbers::sqrt2 * (c.alpha * std::exp(pole->lambda * t) / pole->derivative).real();
    out.table.add_row({t, s.reductions[k].x_c, lor, weak, tail});
  }
  return out;
}

ExperimentResult run_moments(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const SubEnsembleGrid grid = make_grid(c);
  const DriftModel model = build_drift_matrix(c.params, grid, c.p);
  const auto [y0, gamma0] = initial_state(InitialKind::TiltedSpin, grid, 0.0, c.theta);
  const std::vector<double> times = linspace(0.0, c.t_max, c.t_samples);
  PropagationOptions opt;
  opt.keep_covariances = false;
  const MomentSeries s = evolve_moments(model, y0, gamma0, times, opt);

  ExperimentResult out;
  out.manifest = base_manifest(c);
  add_time_grid(out.manifest, c, opt);
  out.manifest.set("theta", c.theta);
  out.manifest.set("propagator", model.dim() > opt.runge_kutta_max_dim ? "modal" : "runge-kutta");

  const double n = c.n_spins;
  const double sx0 = s.reductions.front().s_x;
  out.table.columns = {"t", "Sx_over_Sx0", "Pc", "VarSx_over_N_minus_1", "twoVarPc_minus_1", "R"};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CollectiveRecord& r = s.reductions[k];
    out.table.add_row({times[k], cell(r.s_x / sx0), r.p_c, r.var_s_x / n - 1.0, 2.0 * r.var_p_c - 1.0, cell(r.r)});
  }

  auto& sum = out.table.summary;
  sum.emplace_back("relaxation_defined", s.relaxation_defined ? "true" : "false");
  if (s.relaxation_defined) {
    sum.emplace_back("VarSx_inf_over_N_minus_1", format_number(s.var_s_x_asymptote / n - 1.0));
    sum.emplace_back("twoVarPc_inf_minus_1", format_number(2.0 * s.var_p_c_asymptote - 1.0));
    const auto gamma = try_gamma(c);
    if (gamma && c.p == 1.0 && c.params.delta_cs == 0.0 &&
        c.params.g_ens * c.params.g_ens < c.params.kappa * *gamma) {
      const HomogeneousSteadyMoments h = steady_state_moments_hom(c.params.kappa, *gamma, c.params.g_ens, n);
      sum.emplace_back("ratio_VarSx_excess", format_number((s.var_s_x_asymptote / n - 1.0) / (h.var_s_x / n - 1.0)));
      sum.emplace_back("ratio_VarPc_excess",
                       format_number((2.0 * s.var_p_c_asymptote - 1.0) / (2.0 * h.var_p_c - 1.0)));
    }
  }
  return out;
}

ExperimentResult run_spectrum(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const std::vector<double> grid = linspace(c.delta_e_min, c.delta_e_max, c.delta_e_samples);
  const SpectrumTable table = spectrum_scan(c.params, c.spec, c.p, grid);

  ExperimentResult out;
  out.manifest = base_manifest(c);
  out.manifest.set("m", 0);
  out.manifest.set("delta_e_min", c.delta_e_min);
  out.manifest.set("delta_e_max", c.delta_e_max);
  out.manifest.set("delta_e_samples", c.delta_e_samples);
  out.table.columns = {"delta_e", "re_t", "im_t", "abs_t2", "re_r", "im_r", "abs_r2", "valid"};
  for (const SpectrumRow& r : table.rows) {
    if (!r.valid) {
      out.table.add_row({r.delta_e, {}, {}, {}, {}, {}, {}, 0.0});
      continue;
    }
    out.table.add_row({r.delta_e, r.t.real(), r.t.imag(), r.abs_t2, r.r.real(), r.r.imag(), r.abs_r2, 1.0});
  }
  return out;
}

ExperimentResult run_stability_sweep(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const bool windowed = c.params.gamma_perp == 0.0 && c.spec.family != Family::Homogeneous;
  ExperimentResult out;
  out.manifest = base_manifest(c);
  out.manifest.set("g_min", c.g_min);
  out.manifest.set("g_max", c.g_max);
  out.manifest.set("g_samples", c.g_samples);
  out.manifest.set("kappa_min", c.kappa_min);
  out.manifest.set("kappa_max", c.kappa_max);
  out.manifest.set("kappa_samples", c.kappa_samples);
  out.manifest.set("numeric_verdict", windowed ? "kick decay between t_max/2 and t_max" : "spectral abscissa");
  if (windowed) {
    out.manifest.set("t_max", c.t_max);
    out.manifest.set("alpha", c.alpha);
  }

  const double share = c.params.kappa1 / c.params.kappa;
  const double gamma = characteristic_width(c.spec, c.params.gamma_perp);
  const std::vector<double> times{0.0, 0.5 * c.t_max, c.t_max};
  out.table.columns = {"g_ens", "kappa", "Gamma", "C", "spectral_abscissa_discrete", "stable_analytic",
                       "stable_numeric"};
  for (const double g : linspace(c.g_min, c.g_max, c.g_samples)) {
    for (const double kappa : linspace(c.kappa_min, c.kappa_max, c.kappa_samples)) {
      SystemParams p = c.params;
      p.g_ens = g;
      p.kappa = kappa;
      p.kappa1 = share * kappa;
      p.kappa2 = kappa - p.kappa1;
      const double cc = g * g / (kappa * gamma);
      RunConfig point = c;
      point.params = p;
      const DriftModel model = build_drift_matrix(p, make_grid(point), c.p);
      const double abscissa = spectral_abscissa(model);
      bool stable_numeric = abscissa < 0.0;
      if (windowed) {
        const auto [y0, g0] = initial_state(InitialKind::FieldKick, model.grid, c.alpha);
        const MomentSeries s = evolve_mean(model, y0, times);
        stable_numeric = std::abs(s.reductions[2].x_c) < std::abs(s.reductions[1].x_c);
      }
      out.table.add_row({g, kappa, gamma, cc, abscissa, c.p * cc < 1.0 ? 1.0 : 0.0, stable_numeric ? 1.0 : 0.0});
    }
  }
  return out;
}

ExperimentResult run_pole(const RunConfig& config) {
  const RunConfig c = resolve(config);
  const double sigma = c.spec.width;
  const double gamma = characteristic_width(c.spec, c.params.gamma_perp);
  const double g2 = c.params.g_ens * c.params.g_ens;

  ExperimentResult out;
  out.manifest = base_manifest(c);
  out.manifest.set("m", 0);
  out.manifest.set("pole_tolerance", "1e-10 kappa");

  out.table.columns = {"slow", "lambda_re", "lambda_im", "residual", "iterations", "residue_re", "residue_im"};
  const auto add = [&](const PoleResult& r, bool slow) {
    const Complex residue = 1.0 / r.derivative;
    out.table.add_row({slow ? 1.0 : 0.0, r.lambda.real(), r.lambda.imag(), r.residual,
                       static_cast<double>(r.iterations), residue.real(), residue.imag()});
  };
  const PoleResult slow = gaussian_slow_pole(c.params, sigma);
  std::optional<PoleResult> fast;
  std::string fast_status = "none distinct from the slow root";
  try {
    fast = gaussian_fast_pole(c.params, sigma);
  } catch (const NumericalFailure&) {
    fast_status = "not converged";
  } catch (const DomainError&) {
    fast_status = "seed outside the supported domain of w";
  }
  if (fast && std::abs(fast->lambda - slow.lambda) > 1e-6 * std::max(1.0, std::abs(slow.lambda))) {
    add(*fast, false);
  } else {
    out.table.summary.emplace_back("fast_pole", fast_status);
  }
  add(slow, true);

  const auto hom = mean_value_eigenvalues(c.params.kappa, c.params.gamma_perp, c.params.g_ens);
  out.table.summary.emplace_back("kappa_c", format_number(g2 / gamma));
  out.table.summary.emplace_back("threshold_rate_approx",
                                 format_number(threshold_rate_approx(c.params.kappa, g2 / gamma, sigma, c.params.g_ens)));
  out.table.summary.emplace_back("homogeneous_lambda_minus_re", format_number(hom.second.real()));
  out.table.summary.emplace_back("homogeneous_lambda_minus_im", format_number(hom.second.imag()));
  return out;
}

ExperimentResult run_experiment(const RunConfig& config) {
  switch (config.experiment) {
    case Experiment::Decay:
      return run_decay(config);
    case Experiment::Moments:
      return run_moments(config);
    case Experiment::Spectrum:
      return run_spectrum(config);
    case Experiment::StabilitySweep:
      return run_stability_sweep(config);
    case Experiment::Pole:
      return run_pole(config);
  }
  throw InvalidParameter("unknown experiment");
}

}  // namespace cavspin
