#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include <Eigen/Core>

#include "cavspin/errors.hpp"

namespace cavspin {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  long max_steps = 10'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

template <typename State>
double scaled_error(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.array().abs().max(y1.array().abs())).eval();
  return (err.array().abs() / scale).maxCoeff();
}

}  // namespace detail

/// Dormand-Prince 5(4) with FSAL and a max-norm error controller.
///
/// `rhs(t, y, dydt)` writes the derivative, `observe(k, t, y)` receives the
/// solution at each requested time (steps are clipped to land on them), and
/// `project(y)` runs after every accepted step (symmetrization and the like).
/// `State` is any dense Eigen type with real or complex scalars.
template <typename State, typename Rhs, typename Observer, typename Project>
OdeStats integrate_dopri5(Rhs&& rhs, State y, std::span<const double> times, Observer&& observe, Project&& project,
                          const OdeOptions& opt = {}) {
  OdeStats stats;
  if (times.empty()) return stats;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidParameter("output times must be strictly increasing");
  }

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = times[0];
  observe(std::size_t{0}, t, y);
  if (times.size() == 1) return stats;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, stage = y, y_new = y, err = y;
  rhs(t, y, k1);

  // Starting step from the scale of y and y'.
  const auto sc = (opt.atol + opt.rtol * y.array().abs()).eval();
  const double d0 = (y.array().abs() / sc).maxCoeff();
  const double d1 = (k1.array().abs() / sc).maxCoeff();
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, times.back() - t);

  std::size_t next = 1;
  while (next < times.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw NumericalFailure("dopri5: step budget exhausted at t = " + std::to_string(t));
    }
    const double target = times[next];
    bool lands = false;
    if (t + h >= target || target - (t + h) < 1e-12 * std::max(1.0, std::abs(target))) {
      h = target - t;
      lands = true;
    }
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw NumericalFailure("dopri5: step size underflow at t = " + std::to_string(t));
    }

    stage = y + h * (a21 * k1);
    rhs(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, stage, k6);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, y_new, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = detail::scaled_error(err, y, y_new, opt.atol, opt.rtol);
    if (!std::isfinite(en)) {
      throw NumericalFailure("dopri5: non-finite error estimate at t = " + std::to_string(t));
    }
    if (en <= 1.0) {
      ++stats.accepted;
      t = lands ? target : t + h;
      y.swap(y_new);
      project(y);
      if (lands) {
        rhs(t, y, k1);
        observe(next, t, y);
        ++next;
      } else {
        k1.swap(k7);
      }
      const double grow = en == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
      h *= grow;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  return stats;
}

template <typename State, typename Rhs, typename Observer>
OdeStats integrate_dopri5(Rhs&& rhs, const State& y, std::span<const double> times, Observer&& observe,
                          const OdeOptions& opt = {}) {
  return integrate_dopri5(std::forward<Rhs>(rhs), y, times, std::forward<Observer>(observe), [](State&) {}, opt);
}

}  // namespace cavspin
