#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "cavspin/analytics.hpp"
#include "cavspin/dynamics.hpp"
#include "cavspin/errors.hpp"
#include "cavspin/ode.hpp"
#include "cavspin/probing.hpp"

using namespace cavspin;

namespace {

SystemParams mirrors(double kappa1, double kappa2, double gamma_perp, double g) {
  SystemParams p;
  p.kappa1 = kappa1;
  p.kappa2 = kappa2;
  p.kappa = kappa1 + kappa2;
  p.gamma_perp = gamma_perp;
  p.g_ens = g;
  return p;
}

}  // namespace

TEST_CASE("empty cavity is transparent on resonance") {
  const auto rt = reflection_transmission(SystemParams::symmetric(2.0, 1.0, 0.0), BroadeningSpec::homogeneous(), {});
  CHECK(std::abs(rt.t - 1.0) <= 1e-15);
  CHECK(std::abs(rt.r) <= 1e-15);
  const SystemParams p = mirrors(1.0, 3.0, 0.5, 1.2);
  const ProbeConfig probe{Complex(0.3, -0.4), 0.7, -1.0};
  const Complex a = driven_field(p, BroadeningSpec::lorentzian(0.6), probe);
  const auto rt2 = reflection_transmission(p, BroadeningSpec::lorentzian(0.6), probe);
  CHECK(std::abs(rt2.t * probe.beta0 - std::sqrt(2.0 * p.kappa2) * a) <= 1e-14);
  CHECK(std::abs((rt2.r + 1.0) * probe.beta0 - std::sqrt(2.0 * p.kappa1) * a) <= 1e-14);
}

TEST_CASE("driven steady state matches the long-time driven dynamics") {
  for (double p : {-1.0, 1.0}) {
    const SystemParams prm = SystemParams::symmetric(3.0, 1.0, 1.0);
    const DriftModel model = build_drift_matrix(prm, discretize(BroadeningSpec::homogeneous(), 1, 1.0, 1e4), p);
    const double delta_e = 0.4;
    const Complex beta0(0.5, 0.2);
    const Eigen::MatrixXcd k = mode_generator(model);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2);
    b[0] = std::numbers::sqrt2 * std::sqrt(2.0 * prm.kappa1) * beta0;
    const Eigen::MatrixXcd shifted = k + Complex(0.0, delta_e) * Eigen::MatrixXcd::Identity(2, 2);
    Eigen::VectorXcd end;
    const std::vector<double> t{0.0, 60.0};
    integrate_dopri5([&](double, const Eigen::VectorXcd& c, Eigen::VectorXcd& dc) { dc = shifted * c + b; },
                     Eigen::VectorXcd(Eigen::VectorXcd::Zero(2)), t,
                     [&](std::size_t, double, const Eigen::VectorXcd& c) { end = c; });
    const DrivenState s = driven_steady_state(model, beta0, delta_e);
    CHECK(std::abs(s.modes[0] - end[0]) <= 1e-6 * std::abs(end[0]));
    CHECK(std::abs(s.modes[1] - end[1]) <= 1e-5 * std::abs(end[1]));
    const Complex analytic = driven_field(prm, BroadeningSpec::homogeneous(), {beta0, delta_e, p});
    CHECK(std::abs(s.field() - analytic) <= 1e-10 * std::abs(analytic));
  }
}

TEST_CASE("a ground-state sample is passive") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 5.0), de(-20.0, 20.0);
  for (int k = 0; k < 300; ++k) {
    const SystemParams p = mirrors(u(rng), u(rng), 0.2 * u(rng), u(rng));
    const BroadeningSpec spec = k % 3 == 0 ? BroadeningSpec::homogeneous()
                                : k % 3 == 1 ? BroadeningSpec::lorentzian(u(rng))
                                             : BroadeningSpec::gaussian(u(rng));
    const auto rt = reflection_transmission(p, spec, {1.0, de(rng), -1.0});
    CHECK(std::norm(rt.r) + std::norm(rt.t) <= 1.0 + 1e-9);
  }
}

TEST_CASE("spectra are symmetric in the probe detuning") {
  const SystemParams p = SystemParams::symmetric(2.0, 0.3, 1.5);
  for (const auto& spec : {BroadeningSpec::homogeneous(), BroadeningSpec::lorentzian(1.0), BroadeningSpec::gaussian(0.8)}) {
    for (double d : {0.1, 1.0, 3.7}) {
      const auto plus = reflection_transmission(p, spec, {1.0, d, -1.0});
      const auto minus = reflection_transmission(p, spec, {1.0, -d, -1.0});
      CHECK(std::norm(plus.t) == doctest::Approx(std::norm(minus.t)).epsilon(1e-12));
      CHECK(std::norm(plus.r) == doctest::Approx(std::norm(minus.r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("strong coupling splits the transmission into two peaks") {
  const SystemParams p = SystemParams::symmetric(10.0, 1.0, 10.0);
  std::vector<double> grid;
  for (int k = 0; k <= 4000; ++k) grid.push_back(-20.0 + 0.01 * k);
  const SpectrumTable table = spectrum_scan(p, BroadeningSpec::homogeneous(), -1.0, grid);
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < table.rows.size(); ++k) {
    if (table.rows[k].abs_t2 > table.rows[k - 1].abs_t2 && table.rows[k].abs_t2 > table.rows[k + 1].abs_t2) {
      peaks.push_back(table.rows[k].delta_e);
    }
  }
  REQUIRE(peaks.size() == 2);
  CHECK(std::abs(peaks[0] + 10.0) <= 1.0);
  CHECK(std::abs(peaks[1] - 10.0) <= 1.0);
}

TEST_CASE("pC is recovered from resonant coefficients") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 4.0), uc(0.01, 0.95);
  for (int k = 0; k < 100; ++k) {
    const double kappa1 = u(rng), kappa2 = u(rng), gamma = u(rng);
    const double p = k % 2 ? 1.0 : -1.0;
    const double c = k % 2 ? uc(rng) : 10.0 * uc(rng);
    const double g = std::sqrt(c * (kappa1 + kappa2) * gamma);
    const SystemParams prm = mirrors(kappa1, kappa2, gamma, g);
    const auto rt = reflection_transmission(prm, BroadeningSpec::homogeneous(), {1.0, 0.0, p});
    const PcEstimate from_r = estimate_pc(rt.r, ProbeQuantity::Reflection, kappa1, kappa2);
    const PcEstimate from_t = estimate_pc(rt.t, ProbeQuantity::Transmission, kappa1, kappa2);
    CHECK(from_r.pc == doctest::Approx(p * c).epsilon(1e-10).scale(1.0));
    CHECK(from_t.pc == doctest::Approx(p * c).epsilon(1e-10).scale(1.0));
    CHECK(std::abs(from_r.imag_residual) <= 1e-10);
    CHECK(std::abs(from_t.imag_residual) <= 1e-10);
  }
  CHECK_THROWS_AS(estimate_pc(0.0, ProbeQuantity::Transmission, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("depletion rate and photon budget") {
  CHECK(sz_depletion_rate(-1.0, 2.0, 1.0, 3.0) == doctest::Approx(48.0));
  CHECK(sz_depletion_rate(1.0, 2.0, 1.0, 3.0) == doctest::Approx(-48.0));
  CHECK(photon_budget(2.0, 1.0, -1.0, 1e6) == doctest::Approx(1e6));
  CHECK(photon_budget(2.0, 1.0, 0.5, 1e6) == doctest::Approx(1e6 / 8.0));
  CHECK(photon_budget(2.0, 1.0, 0.0, 1e6) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(sz_depletion_rate(1.0, 1.0, 0.0, 1.0), InvalidParameter);
}

TEST_CASE("driven response preconditions") {
  const auto spec = BroadeningSpec::homogeneous();
  CHECK_THROWS_AS(driven_field(SystemParams::symmetric(1.0, 1.0, 2.0), spec, {1.0, 0.0, 1.0}), UnstableModel);
  CHECK_THROWS_AS(driven_field(SystemParams::symmetric(1.0, 1.0, 0.5), spec, {1.0, 0.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(driven_field(SystemParams::symmetric(1.0, 1.0, 0.5), spec, {1.0, 0.0, -1.5}), InvalidParameter);
  CHECK_THROWS_AS(driven_field(SystemParams::symmetric(1.0, 1.0, 0.5, 0.3), spec, {}), InvalidParameter);
  const SpectrumTable t = spectrum_scan(SystemParams::symmetric(1.0, 1.0, 2.0), spec, 1.0, {0.0, 1.0});
  CHECK_FALSE(t.rows[0].valid);
  CHECK(t.rows[0].abs_t2 == 0.0);
}

TEST_CASE("undriven drain from steady-state correlations") {
  const double kappa = 3.0, gamma = 1.0, g = std::sqrt(0.5 * kappa * gamma);
  const auto grid = discretize(BroadeningSpec::homogeneous(), 1, g, 1e5);
  const DriftModel inverted = build_drift_matrix(SystemParams::symmetric(kappa, gamma, g), grid, 1.0);
  const double c = g * g / (kappa * gamma);
  CHECK(sz_drain_from_covariance(inverted, steady_state_covariance(inverted)) ==
        doctest::Approx(-4.0 * g * g / ((kappa + gamma) * (1.0 - c))).epsilon(1e-6));
  const DriftModel ground = build_drift_matrix(SystemParams::symmetric(kappa, gamma, g), grid, -1.0);
  CHECK(std::abs(sz_drain_from_covariance(ground, steady_state_covariance(ground))) <= 1e-9);
}

TEST_CASE("driven drain of a discretized Lorentzian matches the depletion formula") {
  const SystemParams prm = SystemParams::symmetric(4.0, 0.5, 1.0);
  const BroadeningSpec spec = BroadeningSpec::lorentzian(1.0);
  const DriftModel model = build_drift_matrix(prm, discretize(spec, 401, prm.g_ens, 1e6), -1.0);
  const Complex beta0(0.3, 0.0);
  const DrivenState s = driven_steady_state(model, beta0, 0.0);
  const Complex a = driven_field(prm, spec, {beta0, 0.0, -1.0});
  CHECK(std::abs(s.field() - a) <= 1e-2 * std::abs(a));
  const double gamma = characteristic_width(spec, prm.gamma_perp);
  const double expected = sz_depletion_rate(-1.0, prm.g_ens, gamma, std::norm(a));
  CHECK(sz_drain_from_driven_state(model, s) == doctest::Approx(expected).epsilon(1e-2));
}
