#include "cavspin/dynamics.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Eigenvalues>

#include "cavspin/errors.hpp"
#include "cavspin/lyapunov.hpp"
#include "modal.hpp"

namespace cavspin {

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw InvalidParameter("time grid is empty");
  if (times[0] != 0.0) throw InvalidParameter("time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidParameter("time grid must be strictly increasing");
  }
}

void revival_guard(const DriftModel& model, std::span<const double> times) {
  if (model.params.gamma_perp != 0.0 || !model.grid.uniform_spacing) return;
  const double t_rev = revival_time(model.grid);
  if (times.back() > 0.25 * t_rev * (1.0 + 1e-12)) {
    throw InvalidParameter("window t_max = " + std::to_string(times.back()) +
                           " exceeds a quarter of the grid revival time 2 pi / dDelta = " + std::to_string(t_rev) +
                           "; increase M or shorten the window");
  }
}

bool use_modal_covariance(const DriftModel& model, const PropagationOptions& options) {
  switch (options.method) {
    case Propagator::RungeKutta:
      return false;
    case Propagator::Modal:
      return true;
    case Propagator::Automatic:
      break;
  }
  return model.dim() > options.runge_kutta_max_dim;
}

void check_model(const DriftModel& model) {
  if (model.dim() < 2 || model.drift.rows() != model.dim() || model.drift.cols() != model.dim()) {
    throw InvalidParameter("drift model is malformed");
  }
}

std::vector<StateVector> propagate_mean(const DriftModel& model, const StateVector& y0, std::span<const double> times,
                                        const PropagationOptions& options, const detail::ModalPropagator* modal) {
  if (y0.size() != model.dim()) throw InvalidParameter("initial mean has the wrong length");
  std::vector<StateVector> out(times.size());
  if (options.method == Propagator::Modal) {
    std::unique_ptr<detail::ModalPropagator> own;
    if (!modal) {
      own = std::make_unique<detail::ModalPropagator>(model);
      modal = own.get();
    }
    detail::ModalPropagator prop = *modal;
    prop.set_mean(y0);
    for (std::size_t k = 0; k < times.size(); ++k) out[k] = prop.mean_at(times[k]);
    return out;
  }
  const auto& m = model.drift;
  integrate_dopri5(
      [&m](double, const StateVector& y, StateVector& dy) { dy.noalias() = m * y; }, y0, times,
      [&out](std::size_t k, double, const StateVector& y) { out[k] = y; }, options.ode);
  return out;
}

struct CovarianceRun {
  std::vector<CovarianceMatrix> covariances;
  std::vector<CollectiveRecord> reductions;
};

CovarianceRun propagate_covariance(const DriftModel& model, const CovarianceMatrix& gamma0,
                                   std::span<const double> times, const PropagationOptions& options,
                                   const detail::ModalPropagator* modal) {
  if (gamma0.rows() != model.dim() || gamma0.cols() != model.dim()) {
    throw InvalidParameter("initial covariance has the wrong shape");
  }
  if ((gamma0 - gamma0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, gamma0.cwiseAbs().maxCoeff())) {
    throw InvalidParameter("initial covariance is not symmetric");
  }
  CovarianceRun run;
  run.reductions.resize(times.size());
  if (options.keep_covariances) run.covariances.resize(times.size());

  if (modal || use_modal_covariance(model, options)) {
    std::unique_ptr<detail::ModalPropagator> own;
    if (!modal) {
      own = std::make_unique<detail::ModalPropagator>(model);
      modal = own.get();
    }
    detail::ModalPropagator prop = *modal;
    prop.set_covariance(gamma0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (options.keep_covariances) {
        run.covariances[k] = prop.covariance_at(times[k]);
        run.reductions[k] = reduce_state(nullptr, &run.covariances[k]);
      } else {
        const detail::VarianceSnapshot v = prop.variances_at(times[k]);
        run.reductions[k].var_x_c = v.var_x_c;
        run.reductions[k].var_p_c = v.var_p_c;
        run.reductions[k].var_s_x = v.var_s_x;
        run.reductions[k].var_s_y = v.var_s_y;
      }
    }
    return run;
  }

  const Eigen::MatrixXd m = model.dense_drift();
  const Eigen::VectorXd noise = model.noise;
  integrate_dopri5(
      [&m, &noise](double, const Eigen::MatrixXd& g, Eigen::MatrixXd& dg) {
        dg.noalias() = m * g;
        dg += dg.transpose().eval();
        dg.diagonal() += noise;
      },
      Eigen::MatrixXd(gamma0), times,
      [&run, &options](std::size_t k, double, const Eigen::MatrixXd& g) {
        run.reductions[k] = reduce_state(nullptr, &g);
        if (options.keep_covariances) run.covariances[k] = g;
      },
      [](Eigen::MatrixXd& g) { g = 0.5 * (g + g.transpose()).eval(); }, options.ode);
  return run;
}

void fill_means(MomentSeries& s) {
  for (std::size_t k = 0; k < s.means.size(); ++k) {
    const CollectiveRecord c = reduce_state(&s.means[k], nullptr);
    s.reductions[k].x_c = c.x_c;
    s.reductions[k].p_c = c.p_c;
    s.reductions[k].s_x = c.s_x;
    s.reductions[k].s_y = c.s_y;
  }
}

double abscissa_of(const Eigen::VectorXcd& lambda) { return lambda.real().maxCoeff(); }

std::optional<CollectiveAsymptote> asymptote_impl(const DriftModel& model, const CovarianceMatrix& gamma0,
                                                  double plateau_tol, const detail::ModalPropagator* modal) {
  const double abscissa = modal ? abscissa_of(modal->eigenvalues()) : spectral_abscissa(model);
  if (abscissa < 0.0) {
    const CovarianceMatrix ss = steady_state_covariance(model);
    const CollectiveRecord red = reduce_state(nullptr, &ss);
    return CollectiveAsymptote{red.var_s_x, red.var_p_c, true};
  }
  if (model.params.gamma_perp != 0.0 || model.grid.size() < 2) return std::nullopt;

  const double t_rev = revival_time(model.grid);
  const std::array<double, 3> times{0.0, 0.125 * t_rev, 0.25 * t_rev};
  CovarianceRun run;
  PropagationOptions options;
  options.keep_covariances = false;
  run = propagate_covariance(model, gamma0, times, options, modal);
  const CollectiveRecord& a = run.reductions[1];
  const CollectiveRecord& b = run.reductions[2];
  const auto settled = [plateau_tol](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && std::abs(y - x) <= plateau_tol * std::abs(y);
  };
  if (!settled(a.var_s_x, b.var_s_x) || !settled(a.var_p_c, b.var_p_c)) return std::nullopt;
  return CollectiveAsymptote{b.var_s_x, b.var_p_c, false};
}

void apply_relaxation(MomentSeries& series, std::optional<double> var_inf) {
  series.relaxation_defined = false;
  series.var_s_x_asymptote = std::numeric_limits<double>::quiet_NaN();
  for (auto& r : series.reductions) r.r = std::numeric_limits<double>::quiet_NaN();
  if (!var_inf || series.reductions.empty()) return;
  const double v0 = series.reductions.front().var_s_x;
  const double denom = *var_inf - v0;
  if (!std::isfinite(denom) || denom == 0.0) return;
  series.relaxation_defined = true;
  series.var_s_x_asymptote = *var_inf;
  for (auto& r : series.reductions) r.r = (*var_inf - r.var_s_x) / denom;
}

}  // namespace

CollectiveRecord reduce_state(const StateVector* mean, const CovarianceMatrix* gamma) {
  CollectiveRecord out;
  if (mean) {
    const auto& y = *mean;
    const int m = static_cast<int>(y.size() / 2) - 1;
    out.x_c = y[kFieldX];
    out.p_c = y[kFieldP];
    for (int k = 0; k < m; ++k) {
      out.s_x += y[spin_x_index(k)];
      out.s_y += y[spin_y_index(k)];
    }
  }
  if (gamma) {
    const auto& g = *gamma;
    const int m = static_cast<int>(g.rows() / 2) - 1;
    out.var_x_c = 0.5 * g(kFieldX, kFieldX);
    out.var_p_c = 0.5 * g(kFieldP, kFieldP);
    double sxx = 0.0;
    double syy = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        sxx += g(spin_x_index(j), spin_x_index(k));
        syy += g(spin_y_index(j), spin_y_index(k));
      }
    }
    out.var_s_x = 0.5 * sxx;
    out.var_s_y = 0.5 * syy;
  }
  return out;
}

MomentSeries evolve_mean(const DriftModel& model, const StateVector& y0, std::span<const double> times,
                         const PropagationOptions& options) {
  check_model(model);
  check_times(times);
  revival_guard(model, times);
  MomentSeries s;
  s.times.assign(times.begin(), times.end());
  s.means = propagate_mean(model, y0, times, options, nullptr);
  s.reductions.resize(times.size());
  fill_means(s);
  return s;
}

MomentSeries evolve_covariance(const DriftModel& model, const CovarianceMatrix& gamma0, std::span<const double> times,
                               const PropagationOptions& options) {
  check_model(model);
  check_times(times);
  revival_guard(model, times);
  MomentSeries s;
  s.times.assign(times.begin(), times.end());
  CovarianceRun run = propagate_covariance(model, gamma0, times, options, nullptr);
  s.covariances = std::move(run.covariances);
  s.reductions = std::move(run.reductions);
  return s;
}

MomentSeries evolve_moments(const DriftModel& model, const StateVector& y0, const CovarianceMatrix& gamma0,
                            std::span<const double> times, const PropagationOptions& options) {
  check_model(model);
  check_times(times);
  revival_guard(model, times);

  std::unique_ptr<detail::ModalPropagator> modal;
  if (use_modal_covariance(model, options)) modal = std::make_unique<detail::ModalPropagator>(model);

  MomentSeries s;
  s.times.assign(times.begin(), times.end());
  s.means = propagate_mean(model, y0, times, options, modal.get());
  CovarianceRun run = propagate_covariance(model, gamma0, times, options, modal.get());
  s.covariances = std::move(run.covariances);
  s.reductions = std::move(run.reductions);
  fill_means(s);

  const auto asym = asymptote_impl(model, gamma0, 1e-6, modal.get());
  if (asym) s.var_p_c_asymptote = asym->var_p_c;
  apply_relaxation(s, asym ? std::optional<double>(asym->var_s_x) : std::nullopt);
  return s;
}

double spectral_abscissa(const DriftModel& model) {
  check_model(model);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(mode_generator(model), false);
  if (eig.info() != Eigen::Success) throw NumericalFailure("spectral_abscissa: eigenvalue solver failed");
  return abscissa_of(eig.eigenvalues());
}

CovarianceMatrix steady_state_covariance(const DriftModel& model) {
  const double abscissa = spectral_abscissa(model);
  if (!(abscissa < 0.0)) {
    throw UnstableModel("no steady state: spectral abscissa of the drift matrix is " + std::to_string(abscissa));
  }
  const Eigen::MatrixXcd k = mode_generator(model);
  const Eigen::MatrixXcd d = mode_noise(model).cast<Complex>().asDiagonal();
  const Eigen::MatrixXcd h = solve_continuous_lyapunov(k, d);
  CovarianceMatrix gamma = detail::from_mode_moments(h, Eigen::MatrixXcd::Zero(h.rows(), h.cols()));

  Eigen::MatrixXd residual = model.drift * gamma;
  residual += residual.transpose().eval();
  residual.diagonal() += model.noise;
  const double scale = model.noise.cwiseAbs().maxCoeff();
  const double res = residual.cwiseAbs().maxCoeff();
  if (!(res <= 1e-10 * std::max(scale, 1e-300))) {
    throw NumericalFailure("steady_state_covariance: Lyapunov residual " + std::to_string(res) +
                           " exceeds tolerance (noise scale " + std::to_string(scale) + ")");
  }
  return gamma;
}

std::optional<CollectiveAsymptote> collective_asymptote(const DriftModel& model, const CovarianceMatrix& gamma0,
                                                        double plateau_tol) {
  check_model(model);
  const double abscissa = spectral_abscissa(model);
  if (abscissa < 0.0) return asymptote_impl(model, gamma0, plateau_tol, nullptr);
  if (model.params.gamma_perp != 0.0 || model.grid.size() < 2) return std::nullopt;
  const detail::ModalPropagator modal(model);
  return asymptote_impl(model, gamma0, plateau_tol, &modal);
}

void collective_reduce(MomentSeries& series, const DriftModel&, std::optional<double> var_s_x_asymptote) {
  const std::size_t n = series.times.size();
  if (series.reductions.size() != n) series.reductions.assign(n, CollectiveRecord{});
  if (!series.means.empty()) fill_means(series);
  if (series.covariances.size() == n) {
    for (std::size_t k = 0; k < n; ++k) {
      const CollectiveRecord c = reduce_state(nullptr, &series.covariances[k]);
      series.reductions[k].var_x_c = c.var_x_c;
      series.reductions[k].var_p_c = c.var_p_c;
      series.reductions[k].var_s_x = c.var_s_x;
      series.reductions[k].var_s_y = c.var_s_y;
    }
  }
  apply_relaxation(series, var_s_x_asymptote);
}

void collective_reduce(MomentSeries& series, const DriftModel& model) {
  std::optional<double> var_inf;
  if (!series.covariances.empty()) {
    const auto asym = collective_asymptote(model, series.covariances.front());
    if (asym) {
      var_inf = asym->var_s_x;
      series.var_p_c_asymptote = asym->var_p_c;
    }
  } else if (!series.reductions.empty() && std::isfinite(series.reductions.front().var_s_x)) {
    const auto [mean0, gamma0] = initial_state(InitialKind::Vacuum, model.grid);
    const auto asym = collective_asymptote(model, gamma0);
    if (asym) {
      var_inf = asym->var_s_x;
      series.var_p_c_asymptote = asym->var_p_c;
    }
  }
  collective_reduce(series, model, var_inf);
}

}  // namespace cavspin
