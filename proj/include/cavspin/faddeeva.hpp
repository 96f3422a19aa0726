#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "cavspin/errors.hpp"

namespace cavspin {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
///
/// Region split after Gautschi (as refined by Poppe and Wijers): a Taylor
/// series of erf close to the origin, and Laplace's continued fraction
/// everywhere else. Inside the unit ellipse (|x|/6.3)^2 + (|y|/4.4)^2 < 1 the
/// continued fraction is shifted by h and combined with a truncated Taylor
/// sum, which keeps ~14 digits where a plain erf series would cancel (e.g.
/// along the positive imaginary axis). The lower half-plane is reached
/// through w(z) = 2 exp(-z^2) - w(-z).
///
/// Throws DomainError for non-finite z or Im z < -10 (exp(-z^2) would
/// dominate and overflow further down).
template <typename Real>
std::complex<Real> faddeeva(std::complex<Real> z) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  const Real x_in = z.real();
  const Real y_in = z.imag();
  if (!std::isfinite(x_in) || !std::isfinite(y_in)) {
    throw DomainError("faddeeva: non-finite argument");
  }
  if (y_in < Real(-10)) {
    throw DomainError("faddeeva: Im(z) < -10 is outside the supported domain");
  }

  const Real factor = Real(2) * std::numbers::inv_sqrtpi_v<Real>;
  const Real xabs = std::abs(x_in);
  const Real yabs = std::abs(y_in);
  const Real xs = xabs / Real(6.3);
  const Real ys = yabs / Real(4.4);
  Real qrho = xs * xs + ys * ys;
  const Real xquad = xabs * xabs - yabs * yabs;
  const Real yquad = Real(2) * xabs * yabs;

  Real u = 0;
  Real v = 0;
  Real u2 = 0;
  Real v2 = 0;
  const bool series = qrho < Real(0.085264);
  if (series) {
    qrho = (Real(1) - Real(0.85) * ys) * sqrt(qrho);
    const int n = static_cast<int>(std::lround(6 + 72 * qrho));
    int j = 2 * n + 1;
    Real xsum = Real(1) / Real(j);
    Real ysum = 0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const Real xaux = (xsum * xquad - ysum * yquad) / Real(i);
      ysum = (xsum * yquad + ysum * xquad) / Real(i);
      xsum = xaux + Real(1) / Real(j);
    }
    const Real u1 = -factor * (xsum * yabs + ysum * xabs) + Real(1);
    const Real v1 = factor * (xsum * xabs - ysum * yabs);
    const Real daux = exp(-xquad);
    u2 = daux * cos(yquad);
    v2 = -daux * sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    Real h = 0;
    Real h2 = 0;
    int kapn = 0;
    int nu = 0;
    if (qrho > Real(1)) {
      qrho = sqrt(qrho);
      nu = static_cast<int>(3 + (1442 / (26 * qrho + 77)));
    } else {
      qrho = (Real(1) - ys) * sqrt(Real(1) - qrho);
      h = Real(1.88) * qrho;
      h2 = Real(2) * h;
      kapn = static_cast<int>(std::lround(7 + 34 * qrho));
      nu = static_cast<int>(std::lround(16 + 26 * qrho));
    }
    const bool shifted = h > Real(0);
    Real qlambda = shifted ? std::pow(h2, kapn) : Real(0);
    Real rx = 0;
    Real ry = 0;
    Real sx = 0;
    Real sy = 0;
    for (int n = nu; n >= 0; --n) {
      const Real np1 = Real(n + 1);
      Real tx = yabs + h + np1 * rx;
      const Real ty = xabs - np1 * ry;
      const Real c = Real(0.5) / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (shifted && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (shifted) {
      u = factor * sx;
      v = factor * sy;
    } else {
      u = factor * rx;
      v = factor * ry;
    }
    if (yabs == Real(0)) u = exp(-xabs * xabs);
  }

  if (y_in < Real(0)) {
    if (series) {
      u2 *= Real(2);
      v2 *= Real(2);
    } else {
      const Real w1 = Real(2) * exp(-xquad);
      u2 = w1 * cos(yquad);
      v2 = -w1 * sin(yquad);
    }
    u = u2 - u;
    v = v2 - v;
    if (x_in > Real(0)) v = -v;
  } else if (x_in < Real(0)) {
    v = -v;
  }
  return {u, v};
}

/// w'(z) = -2 z w(z) + 2i/sqrt(pi).
template <typename Real>
std::complex<Real> faddeeva_derivative(std::complex<Real> z) {
  const std::complex<Real> two_i_over_sqrt_pi(Real(0), Real(2) * std::numbers::inv_sqrtpi_v<Real>);
  return Real(-2) * z * faddeeva(z) + two_i_over_sqrt_pi;
}

}  // namespace cavspin
