#include "cavspin/analytics.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cavspin/errors.hpp"
#include "cavspin/faddeeva.hpp"

namespace cavspin {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be positive and finite");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be nonnegative and finite");
}

}  // namespace

std::pair<Complex, Complex> mean_value_eigenvalues(double kappa, double gamma, double g_ens) {
  const double sum = kappa + gamma;
  const double prod = kappa * gamma - g_ens * g_ens;
  const double disc = 0.25 * sum * sum - prod;
  if (disc >= 0.0) {
    const double minus = -0.5 * sum - std::sqrt(disc);
    const double plus = minus != 0.0 ? prod / minus : 0.0;
    return {Complex(plus, 0.0), Complex(minus, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {Complex(-0.5 * sum, im), Complex(-0.5 * sum, -im)};
}

StabilityReport stability_report(const SystemParams& params, const BroadeningSpec& spec) {
  params.validate();
  StabilityReport r;
  r.gamma = characteristic_width(spec, params.gamma_perp);
  const double g2 = params.g_ens * params.g_ens;
  r.kappa_c = g2 / r.gamma;
  r.c = g2 / (params.kappa * r.gamma);
  r.stable = r.c < 1.0;
  std::tie(r.lambda_plus, r.lambda_minus) = mean_value_eigenvalues(params.kappa, r.gamma, params.g_ens);
  r.eigenvalues_exact = spec.family != Family::Gaussian;
  return r;
}

Complex lorentzian_kick_response(double alpha, double kappa, double gamma, double g_ens, double t) {
  require_positive(kappa, "kappa");
  require_nonnegative(gamma, "Gamma");
  if (t < 0.0) return 0.0;
  const auto [lp, lm] = mean_value_eigenvalues(kappa, gamma, g_ens);
  const Complex split = lp - lm;
  if (std::abs(split) <= 1e-7 * (kappa + gamma)) {
    const Complex l = 0.5 * (lp + lm);
    return alpha * (1.0 + (gamma + l) * t) * std::exp(l * t);
  }
  return alpha * ((lp + gamma) * std::exp(lp * t) - (lm + gamma) * std::exp(lm * t)) / split;
}

Complex gaussian_pole_function(const SystemParams& params, double sigma, Complex lambda) {
  const double scale = std::sqrt(std::numbers::pi / 2.0) * params.g_ens * params.g_ens / sigma;
  const Complex z = kI * (lambda + params.gamma_perp) / (std::numbers::sqrt2 * sigma);
  return lambda + params.kappa - scale * faddeeva(z);
}

namespace {

Complex pole_derivative(const SystemParams& params, double sigma, Complex lambda) {
  const double scale = std::sqrt(std::numbers::pi / 2.0) * params.g_ens * params.g_ens / sigma;
  const Complex z = kI * (lambda + params.gamma_perp) / (std::numbers::sqrt2 * sigma);
  return 1.0 - scale * faddeeva_derivative(z) * kI / (std::numbers::sqrt2 * sigma);
}

// F at x, or nullopt when the Faddeeva argument leaves its domain.
std::optional<Complex> try_eval(const SystemParams& params, double sigma, Complex x) {
  try {
    const Complex f = gaussian_pole_function(params, sigma, x);
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) return std::nullopt;
    return f;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

PoleResult gaussian_pole(const SystemParams& params, double sigma, Complex seed) {
  params.validate();
  require_positive(sigma, "sigma");
  if (!std::isfinite(seed.real()) || !std::isfinite(seed.imag())) throw InvalidParameter("pole seed must be finite");

  const double tol = 1e-10 * params.kappa;
  constexpr int kMaxIterations = 100;
  std::vector<Complex> trace{seed};

  Complex x = seed;
  auto fx0 = try_eval(params, sigma, x);
  if (!fx0) throw DomainError("gaussian_pole: seed lies outside the domain of the pole function");
  Complex fx = *fx0;
  Complex x_prev = x;
  Complex f_prev = fx;
  bool have_prev = false;

  for (int it = 0; it <= kMaxIterations; ++it) {
    if (std::abs(fx) <= tol) {
      return PoleResult{x, std::abs(fx), it, pole_derivative(params, sigma, x)};
    }
    if (it == kMaxIterations) break;

    Complex d = pole_derivative(params, sigma, x);
    const bool derivative_ok = std::isfinite(d.real()) && std::isfinite(d.imag()) && std::abs(d) > 1e-300;
    if (!derivative_ok) {
      if (!have_prev || x == x_prev) break;
      d = (fx - f_prev) / (x - x_prev);
    }
    const Complex step = -fx / d;

    // Halve the step until |F| decreases and the argument stays in range.
    double damping = 1.0;
    Complex x_new = x + step;
    std::optional<Complex> f_new;
    for (int k = 0; k < 40; ++k) {
      x_new = x + damping * step;
      f_new = try_eval(params, sigma, x_new);
      if (f_new && std::abs(*f_new) < std::abs(fx)) break;
      damping *= 0.5;
    }
    if (!f_new) break;

    x_prev = x;
    f_prev = fx;
    have_prev = true;
    x = x_new;
    fx = *f_new;
    trace.push_back(x);
  }

  std::ostringstream msg;
  msg.precision(10);
  msg << "gaussian_pole: no convergence from seed " << seed << "; iterates:";
  for (const Complex& v : trace) msg << ' ' << v;
  msg << "; final |F| = " << std::abs(fx);
  throw NumericalFailure(msg.str());
}

PoleResult gaussian_slow_pole(const SystemParams& params, double sigma) {
  params.validate();
  require_positive(sigma, "sigma");
  const double gamma = characteristic_width(BroadeningSpec::gaussian(sigma), params.gamma_perp);
  const double g2 = params.g_ens * params.g_ens;
  std::vector<Complex> seeds{threshold_rate_approx(params.kappa, g2 / gamma, sigma, params.g_ens),
                             mean_value_eigenvalues(params.kappa, gamma, params.g_ens).first, 0.0,
                             -params.gamma_perp - 0.5 * sigma, -params.gamma_perp - sigma};
  std::optional<PoleResult> best;
  std::string failures;
  for (const Complex& s : seeds) {
    try {
      const PoleResult r = gaussian_pole(params, sigma, s);
      if (!best || r.lambda.real() > best->lambda.real() + 1e-12) best = r;
    } catch (const Error& e) {
      failures += std::string("\n  ") + e.what();
    }
  }
  if (!best) throw NumericalFailure("gaussian_slow_pole: no seed converged" + failures);
  if (std::abs(best->lambda.imag()) < 1e-12 * std::max(1.0, std::abs(best->lambda.real()))) {
    best->lambda.imag(0.0);
  }
  return *best;
}

PoleResult gaussian_fast_pole(const SystemParams& params, double sigma) {
  return gaussian_pole(params, sigma, mean_value_eigenvalues(params.kappa, params.gamma_perp, params.g_ens).second);
}

double threshold_rate_approx(double kappa, double kappa_c, double sigma, double g_ens) {
  require_positive(sigma, "sigma");
  const double d = kappa_c - kappa;
  const double q = 1.0 + g_ens * g_ens / (sigma * sigma);
  return d / q + std::sqrt(std::numbers::pi / 8.0) * g_ens * g_ens / (sigma * sigma * sigma) * d * d / (q * q * q);
}

double weak_coupling_response(double alpha, const SystemParams& params, double sigma, double t) {
  params.validate();
  require_nonnegative(sigma, "sigma");
  const double k = params.kappa;
  return alpha * std::exp(-k * t) +
         alpha * params.g_ens * params.g_ens / (k * k) *
             std::exp(-0.5 * sigma * sigma * t * t - params.gamma_perp * t);
}

HomogeneousSteadyMoments steady_state_moments_hom(double kappa, double gamma, double g_ens, double total_spins) {
  require_positive(kappa, "kappa");
  require_positive(gamma, "Gamma");
  require_positive(total_spins, "N");
  const double c = g_ens * g_ens / (kappa * gamma);
  if (!(c < 1.0)) {
    throw UnstableModel("steady second moments need C < 1 (C = " + std::to_string(c) + ")");
  }
  const double skew = c * (kappa - gamma) / (kappa + gamma);
  HomogeneousSteadyMoments m;
  m.var_x_c = 0.5 * (1.0 - skew) / (1.0 - c);
  m.var_p_c = m.var_x_c;
  m.var_s_x = total_spins * (1.0 + skew) / (1.0 - c);
  m.var_s_y = m.var_s_x;
  m.cov_s_x_p_c = -std::sqrt(total_spins / 2.0) * 2.0 * g_ens / ((kappa + gamma) * (1.0 - c));
  m.cov_s_y_x_c = m.cov_s_x_p_c;
  return m;
}

}  // namespace cavspin
