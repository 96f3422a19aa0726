#include "cavspin/model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "cavspin/errors.hpp"

namespace cavspin {

using std::numbers::sqrt2;

SystemParams SystemParams::symmetric(double kappa, double gamma_perp, double g_ens, double delta_cs) {
  return {kappa, 0.5 * kappa, 0.5 * kappa, gamma_perp, g_ens, delta_cs};
}

void SystemParams::validate() const {
  for (double v : {kappa, kappa1, kappa2, gamma_perp, g_ens, delta_cs}) {
    if (!std::isfinite(v)) throw InvalidParameter("system parameters must be finite");
  }
  if (!(kappa > 0.0)) throw InvalidParameter("kappa must be > 0");
  if (kappa1 < 0.0 || kappa2 < 0.0) throw InvalidParameter("mirror decay rates must be >= 0");
  if (gamma_perp < 0.0) throw InvalidParameter("gamma_perp must be >= 0");
  if (g_ens < 0.0) throw InvalidParameter("g_ens must be >= 0");
  if (std::abs(kappa - (kappa1 + kappa2)) > 1e-12 * kappa) {
    throw InvalidParameter("kappa must equal kappa1 + kappa2");
  }
}

DriftModel build_drift_matrix(const SystemParams& params, const SubEnsembleGrid& grid, double p) {
  params.validate();
  if (grid.entries.empty()) throw InvalidParameter("sub-ensemble grid is empty");
  if (p != 1.0 && p != -1.0) throw InvalidParameter("inversion p must be +1 or -1");

  const int m_count = grid.size();
  const int dim = 2 * m_count + 2;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 + 8 * m_count);

  t.emplace_back(kFieldX, kFieldX, -params.kappa);
  t.emplace_back(kFieldX, kFieldP, params.delta_cs);
  t.emplace_back(kFieldP, kFieldX, -params.delta_cs);
  t.emplace_back(kFieldP, kFieldP, -params.kappa);

  DriftModel model;
  model.params = params;
  model.grid = grid;
  model.inversion = p;
  model.noise.resize(dim);
  model.noise[kFieldX] = model.noise[kFieldP] = 2.0 * params.kappa;

  for (int m = 0; m < m_count; ++m) {
    const auto& e = grid.entries[m];
    const int sx = spin_x_index(m);
    const int sy = spin_y_index(m);
    const double b = -e.coupling / sqrt2;
    const double c = -sqrt2 * e.coupling * p * e.spins;
    // B: field rows
    t.emplace_back(kFieldX, sy, b);
    t.emplace_back(kFieldP, sx, b);
    // C: spin rows, field columns
    t.emplace_back(sx, kFieldP, c);
    t.emplace_back(sy, kFieldX, c);
    // D
    t.emplace_back(sx, sx, -params.gamma_perp);
    t.emplace_back(sx, sy, -e.detuning);
    t.emplace_back(sy, sx, e.detuning);
    t.emplace_back(sy, sy, -params.gamma_perp);
    model.noise[sx] = model.noise[sy] = 4.0 * params.gamma_perp * e.spins;
  }
  model.drift.resize(dim, dim);
  model.drift.setFromTriplets(t.begin(), t.end());
  model.drift.makeCompressed();
  return model;
}

Eigen::MatrixXcd mode_generator(const DriftModel& model) {
  const int n = model.modes();
  const auto& prm = model.params;
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  k(0, 0) = Complex(-prm.kappa, -prm.delta_cs);
  for (int m = 0; m < model.grid.size(); ++m) {
    const auto& e = model.grid.entries[m];
    k(0, m + 1) = Complex(0.0, -e.coupling / sqrt2);
    k(m + 1, 0) = Complex(0.0, sqrt2 * e.coupling * model.inversion * e.spins);
    k(m + 1, m + 1) = Complex(-prm.gamma_perp, -e.detuning);
  }
  return k;
}

Eigen::VectorXd mode_noise(const DriftModel& model) {
  const int n = model.modes();
  Eigen::VectorXd d(n);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * model.noise[2 * k];
  return d;
}

HomogeneousMomentSystem build_homogeneous_q(const SystemParams& params, double total_spins) {
  params.validate();
  if (params.delta_cs != 0.0) throw InvalidParameter("the Q-matrix moment system requires delta_cs = 0");
  if (!(total_spins > 0.0)) throw InvalidParameter("N must be positive");
  const double k = params.kappa;
  const double gp = params.gamma_perp;
  const double n = total_spins;
  const double g = params.g_ens / std::sqrt(n);
  const double a = sqrt2 * g;
  const double an = sqrt2 * g * n;

  HomogeneousMomentSystem s;
  s.q.setZero();
  s.q(0, 0) = -2.0 * k;
  s.q(0, 5) = -a;
  s.q(1, 1) = -2.0 * k;
  s.q(1, 4) = -a;
  s.q(2, 2) = -2.0 * gp;
  s.q(2, 4) = -2.0 * an;
  s.q(3, 3) = -2.0 * gp;
  s.q(3, 5) = -2.0 * an;
  s.q(4, 1) = -an;
  s.q(4, 2) = -g / sqrt2;
  s.q(4, 4) = -(k + gp);
  s.q(5, 0) = -an;
  s.q(5, 3) = -g / sqrt2;
  s.q(5, 5) = -(k + gp);
  s.r << k, k, 2.0 * gp * n, 2.0 * gp * n, 0.0, 0.0;
  return s;
}

std::pair<StateVector, CovarianceMatrix> initial_state(InitialKind kind, const SubEnsembleGrid& grid, double alpha,
                                                       double theta) {
  if (grid.entries.empty()) throw InvalidParameter("sub-ensemble grid is empty");
  const int m_count = grid.size();
  const int dim = 2 * m_count + 2;
  StateVector y = StateVector::Zero(dim);
  Eigen::VectorXd diag(dim);
  diag[kFieldX] = diag[kFieldP] = 1.0;
  for (int m = 0; m < m_count; ++m) {
    diag[spin_x_index(m)] = diag[spin_y_index(m)] = 2.0 * grid.entries[m].spins;
  }
  switch (kind) {
    case InitialKind::FieldKick:
      y[kFieldX] = sqrt2 * alpha;
      break;
    case InitialKind::TiltedSpin:
      for (int m = 0; m < m_count; ++m) y[spin_x_index(m)] = theta * grid.entries[m].spins;
      break;
    case InitialKind::Vacuum:
      break;
    default:
      throw InvalidParameter("unknown initial state kind");
  }
  return {y, diag.asDiagonal()};
}

}  // namespace cavspin
