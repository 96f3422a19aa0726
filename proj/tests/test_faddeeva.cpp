#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "cavspin/errors.hpp"
#include "cavspin/faddeeva.hpp"

using cavspin::faddeeva;
using C = std::complex<double>;

namespace {

double rel_err(C a, C b) { return std::abs(a - b) / std::abs(b); }

// (i / pi) * integral of exp(-t^2) / (z - t) over [-20, 20], composite Simpson.
C quadrature_w(C z, int intervals) {
  const double a = -20.0;
  const double h = 40.0 / intervals;
  C sum = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double t = a + k * h;
    const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += weight * std::exp(-t * t) / (z - t);
  }
  return C(0.0, 1.0) / std::numbers::pi * sum * h / 3.0;
}

}  // namespace

TEST_CASE("faddeeva matches reference values") {
  struct Ref {
    C z;
    C w;
  };
  // Values from scipy.special.wofz.
  const std::vector<Ref> refs{
      {{0.0, 0.0}, {1.0, 0.0}},
      {{1.0, 1.0}, {0.30474420525691254, 0.2082189382028316}},
      {{0.5, 0.1}, {0.7175877421575946, 0.4084744016030165}},
      {{3.9, 0.01}, {0.00041585792185629583, 0.14999115695928425}},
      {{4.1, 0.3}, {0.011062914342765573, 0.14123231028958977}},
      {{0.2, 3.9}, {0.13999512773447906, 0.006771037817080333}},
      {{5.5, 2.0}, {0.03422712664924142, 0.09128998291782339}},
      {{29.5, 0.5}, {0.00032462044416281695, 0.019130566324061613}},
      {{10.0, 10.0}, {0.028279467454232453, 0.0281384332763369}},
      {{0.001, 0.001}, {0.9988716223354106, 0.001126380671599899}},
      {{2.0, -1.0}, {-0.20532558064658757, 0.14685548503016754}},
      {{0.3, -2.5}, {66.76937263495908, 944.5063522622108}},
      {{6.0, -0.5}, {-0.008124885586461987, 0.09468791486012648}},
      {{-7.0, 0.2}, {0.002375095938243609, -0.08137740682192361}},
      {{0.0, 1e-8}, {0.9999999887162083, 0.0}},
      {{25.0, -3.0}, {-0.0026758871263701765, 0.022263806885610943}},
      {{1.7, 1.7}, {0.1760080871531809, 0.14967444523586232}},
      {{0.0, 9.9}, {0.05670245693883227, 0.0}},
      {{12.0, 0.0}, {2.8946403116483003e-63, 0.047180778707018846}},
      {{0.5, -9.5}, {-2.4339043688481697e+39, -1.8342934996653793e+38}},
  };
  for (const auto& r : refs) {
    CAPTURE(r.z);
    CHECK(rel_err(faddeeva(r.z), r.w) <= 1e-10);
  }
}

TEST_CASE("faddeeva agrees with direct quadrature at 1+i") {
  const C z{1.0, 1.0};
  CHECK(rel_err(faddeeva(z), quadrature_w(z, 200000)) <= 1e-8);
}

TEST_CASE("faddeeva large-argument asymptote on the imaginary axis") {
  const C w = faddeeva(C(0.0, 50.0));
  const double asym = 1.0 / (std::sqrt(std::numbers::pi) * 50.0);
  CHECK(std::abs(w.imag()) < 1e-15);
  CHECK(std::abs(w.real() - asym) / asym < 1e-3);
  CHECK(faddeeva(C(0.0, 0.0)) == C(1.0, 0.0));
}

TEST_CASE("faddeeva reflection symmetry w(-conj z) = conj w(z)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-30.0, 30.0);
  std::uniform_real_distribution<double> im(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const C z{re(rng), im(rng)};
    CAPTURE(z);
    CHECK(rel_err(faddeeva(-std::conj(z)), std::conj(faddeeva(z))) <= 1e-12);
  }
}

TEST_CASE("faddeeva derivative matches a central difference") {
  for (const C z : {C(0.3, 0.4), C(2.0, 0.1), C(-1.0, 3.0), C(0.5, -0.7)}) {
    const double h = 1e-5;
    const C fd = (faddeeva(z + h) - faddeeva(z - h)) / (2.0 * h);
    CAPTURE(z);
    CHECK(rel_err(cavspin::faddeeva_derivative(z), fd) <= 1e-8);
  }
}

TEST_CASE("faddeeva rejects arguments outside the domain") {
  CHECK_THROWS_AS(faddeeva(C(0.0, -10.5)), cavspin::DomainError);
  CHECK_THROWS_AS(faddeeva(C(std::nan(""), 0.0)), cavspin::DomainError);
  CHECK_THROWS_AS(faddeeva(C(INFINITY, 1.0)), cavspin::DomainError);
}
