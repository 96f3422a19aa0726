#include "cavspin/broadening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cavspin/errors.hpp"
#include "cavspin/faddeeva.hpp"

namespace cavspin {

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Homogeneous: return "homogeneous";
    case Family::Lorentzian: return "lorentzian";
    case Family::Gaussian: return "gaussian";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "homogeneous") return Family::Homogeneous;
  if (name == "lorentzian") return Family::Lorentzian;
  if (name == "gaussian") return Family::Gaussian;
  throw InvalidParameter("unknown broadening family '" + std::string(name) +
                         "' (expected homogeneous, lorentzian or gaussian)");
}

void BroadeningSpec::validate() const {
  if (!std::isfinite(width)) throw InvalidParameter("broadening width must be finite");
  if (family == Family::Homogeneous) {
    if (width != 0.0) throw InvalidParameter("homogeneous broadening takes width = 0");
  } else if (!(width > 0.0)) {
    throw InvalidParameter(std::string(to_string(family)) + " broadening needs width > 0");
  }
}

Eigen::VectorXd SubEnsembleGrid::detunings() const {
  Eigen::VectorXd out(size());
  for (int m = 0; m < size(); ++m) out[m] = entries[m].detuning;
  return out;
}

Eigen::VectorXd SubEnsembleGrid::couplings() const {
  Eigen::VectorXd out(size());
  for (int m = 0; m < size(); ++m) out[m] = entries[m].coupling;
  return out;
}

Eigen::VectorXd SubEnsembleGrid::spin_counts() const {
  Eigen::VectorXd out(size());
  for (int m = 0; m < size(); ++m) out[m] = entries[m].spins;
  return out;
}

void SubEnsembleGrid::check_invariants(double rel_tol) const {
  if (entries.empty()) throw InvalidParameter("sub-ensemble grid is empty");
  double spins = 0.0;
  double g2n = 0.0;
  for (const auto& e : entries) {
    if (!(e.spins > 0.0)) throw InvalidParameter("sub-ensemble spin counts must be positive");
    spins += e.spins;
    g2n += e.coupling * e.coupling * e.spins;
  }
  if (!close_rel(spins, total_spins, rel_tol)) {
    throw InvalidParameter("sub-ensemble spin counts do not add up to N");
  }
  if (!close_rel(g2n, g_ens * g_ens, rel_tol)) {
    throw InvalidParameter("sum of g_m^2 N_m differs from g_ens^2");
  }
  const int n = size();
  for (int m = 0; m < n; ++m) {
    const auto& a = entries[m];
    const auto& b = entries[n - 1 - m];
    const double scale = std::max(std::abs(a.detuning), 1.0);
    if (std::abs(a.detuning + b.detuning) > rel_tol * scale || !close_rel(a.coupling, b.coupling, rel_tol) ||
        !close_rel(a.spins, b.spins, rel_tol)) {
      throw InvalidParameter("sub-ensemble grid is not symmetric about zero detuning");
    }
    if (m > 0 && !(entries[m - 1].detuning < a.detuning)) {
      throw InvalidParameter("sub-ensemble detunings must be strictly increasing");
    }
  }
}

double density(const BroadeningSpec& spec, double delta) {
  spec.validate();
  switch (spec.family) {
    case Family::Homogeneous:
      throw InvalidParameter("homogeneous broadening is a point mass and has no density");
    case Family::Lorentzian: {
      const double half = 0.5 * spec.width;
      return (spec.width / (2.0 * kPi)) / (delta * delta + half * half);
    }
    case Family::Gaussian: {
      const double s = spec.width;
      return std::exp(-delta * delta / (2.0 * s * s)) / (std::sqrt(2.0 * kPi) * s);
    }
  }
  return 0.0;
}

Complex response_integral(const BroadeningSpec& spec, double gamma_perp, double probe) {
  spec.validate();
  if (!(gamma_perp >= 0.0)) throw InvalidParameter("gamma_perp must be >= 0");
  switch (spec.family) {
    case Family::Homogeneous:
      if (gamma_perp == 0.0 && probe == 0.0) {
        throw InvalidParameter("homogeneous response integral diverges at gamma_perp = 0 on resonance");
      }
      return 1.0 / Complex(gamma_perp, -probe);
    case Family::Lorentzian:
      return 1.0 / Complex(0.5 * spec.width + gamma_perp, -probe);
    case Family::Gaussian: {
      const double s = spec.width;
      const Complex z = Complex(probe, gamma_perp) / (std::numbers::sqrt2 * s);
      return std::sqrt(kPi / 2.0) * faddeeva(z) / s;
    }
  }
  return {};
}

double characteristic_width(const BroadeningSpec& spec, double gamma_perp) {
  spec.validate();
  if (!(gamma_perp >= 0.0)) throw InvalidParameter("gamma_perp must be >= 0");
  if (spec.family == Family::Homogeneous && gamma_perp == 0.0) {
    throw InvalidParameter("characteristic width undefined for homogeneous broadening with gamma_perp = 0");
  }
  const Complex inv = response_integral(spec, gamma_perp, 0.0);
  const double gamma = 1.0 / inv.real();
  if (std::abs(inv.imag()) * gamma > 1e-12) {
    throw NumericalFailure("characteristic width has a spurious imaginary part");
  }
  return gamma;
}

SubEnsembleGrid discretize(const BroadeningSpec& spec, int m, double g_ens, double total_spins) {
  spec.validate();
  if (!(g_ens >= 0.0) || !std::isfinite(g_ens)) throw InvalidParameter("g_ens must be finite and >= 0");
  if (!(total_spins > 0.0) || !std::isfinite(total_spins)) throw InvalidParameter("N must be positive");

  SubEnsembleGrid grid;
  grid.total_spins = total_spins;
  grid.g_ens = g_ens;
  const double g_single = g_ens / std::sqrt(total_spins);

  if (spec.family == Family::Homogeneous) {
    grid.entries.push_back({0.0, g_single, total_spins});
    return grid;
  }
  if (m < 3 || m % 2 == 0) {
    throw InvalidParameter("number of sub-ensembles must be odd and >= 3, got " + std::to_string(m));
  }

  std::vector<double> nodes(m);
  std::vector<double> weights(m);
  const int centre = (m - 1) / 2;
  if (spec.family == Family::Gaussian) {
    const double step = 2.0 * kGaussianSpan * spec.width / (m - 1);
    for (int k = 0; k < m; ++k) nodes[k] = (k - centre) * step;
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      const double s = spec.width;
      weights[k] = std::exp(-nodes[k] * nodes[k] / (2.0 * s * s));
      if (k == 0 || k == m - 1) weights[k] *= 0.5;
      total += weights[k];
    }
    for (double& w : weights) w /= total;
    grid.uniform_spacing = step;
  } else {
    // u_k = (k + 1/2) / m, so u_k - 1/2 = (2k + 1 - m) / (2m) is exactly antisymmetric.
    const double half = 0.5 * spec.width;
    for (int k = 0; k < m; ++k) {
      const double offset = static_cast<double>(2 * (k - centre)) / (2.0 * m);
      nodes[k] = half * std::tan(kPi * offset);
      weights[k] = 1.0 / m;
    }
  }

  grid.entries.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double spins = total_spins * weights[k];
    grid.entries.push_back({nodes[k], g_ens * std::sqrt(weights[k] / spins), spins});
  }
  return grid;
}

double discrete_characteristic_width(const SubEnsembleGrid& grid, double gamma_perp) {
  Complex sum = 0.0;
  for (const auto& e : grid.entries) {
    sum += e.coupling * e.coupling * e.spins / Complex(gamma_perp, e.detuning);
  }
  return grid.g_ens * grid.g_ens / sum.real();
}

double revival_time(const SubEnsembleGrid& grid) {
  if (grid.size() < 2) return std::numeric_limits<double>::infinity();
  if (grid.uniform_spacing) return 2.0 * kPi / *grid.uniform_spacing;
  double spacing = std::numeric_limits<double>::infinity();
  for (int m = 1; m < grid.size(); ++m) {
    spacing = std::min(spacing, grid.entries[m].detuning - grid.entries[m - 1].detuning);
  }
  return 2.0 * kPi / spacing;
}

}  // namespace cavspin
