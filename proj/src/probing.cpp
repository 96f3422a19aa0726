#include "cavspin/probing.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "cavspin/errors.hpp"

namespace cavspin {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_p(double p) {
  if (!(p >= -1.0 && p <= 1.0) || p == 0.0) throw InvalidParameter("inversion p must lie in [-1, 1] and be nonzero");
}

}  // namespace

Complex driven_field(const SystemParams& params, const BroadeningSpec& spec, const ProbeConfig& probe) {
  params.validate();
  check_p(probe.p);
  if (params.delta_cs != 0.0) throw InvalidParameter("driven response assumes delta_cs = 0");
  const double g2 = params.g_ens * params.g_ens;
  if (probe.p > 0.0 && g2 > 0.0) {
    const double c = g2 / (params.kappa * characteristic_width(spec, params.gamma_perp));
    if (!(probe.p * c < 1.0)) {
      throw UnstableModel("no driven steady state for an inverted sample with pC = " + std::to_string(probe.p * c));
    }
  }
  const Complex denom =
      params.kappa - kI * probe.delta_e - probe.p * g2 * response_integral(spec, params.gamma_perp, probe.delta_e);
  if (!std::isfinite(denom.real()) || !std::isfinite(denom.imag()) || std::abs(denom) == 0.0) {
    throw InvalidParameter("driven response is singular at delta_e = " + std::to_string(probe.delta_e));
  }
  return std::sqrt(2.0 * params.kappa1) * probe.beta0 / denom;
}

ReflectionTransmission reflection_transmission(const SystemParams& params, const BroadeningSpec& spec,
                                               const ProbeConfig& probe) {
  if (probe.beta0 == Complex(0.0)) throw InvalidParameter("drive amplitude must be nonzero");
  const Complex a = driven_field(params, spec, probe);
  return {(std::sqrt(2.0 * params.kappa1) * a - probe.beta0) / probe.beta0,
          std::sqrt(2.0 * params.kappa2) * a / probe.beta0};
}

SpectrumTable spectrum_scan(const SystemParams& params, const BroadeningSpec& spec, double p,
                            const std::vector<double>& delta_e_grid) {
  SpectrumTable table;
  table.rows.reserve(delta_e_grid.size());
  for (const double de : delta_e_grid) {
    SpectrumRow row;
    row.delta_e = de;
    try {
      const auto rt = reflection_transmission(params, spec, ProbeConfig{1.0, de, p});
      row.r = rt.r;
      row.t = rt.t;
      row.abs_r2 = std::norm(rt.r);
      row.abs_t2 = std::norm(rt.t);
    } catch (const UnstableModel&) {
      row.valid = false;
    }
    table.rows.push_back(row);
  }
  return table;
}

PcEstimate estimate_pc(Complex value, ProbeQuantity which, double kappa1, double kappa2) {
  if (!(kappa1 >= 0.0 && kappa2 >= 0.0 && kappa1 + kappa2 > 0.0)) {
    throw InvalidParameter("mirror rates must be nonnegative with a positive sum");
  }
  const double kappa = kappa1 + kappa2;
  Complex pc;
  if (which == ProbeQuantity::Reflection) {
    if (value == Complex(-1.0)) throw InvalidParameter("r = -1 leaves pC undetermined");
    pc = (value - (kappa1 - kappa2) / kappa) / (value + 1.0);
  } else {
    if (value == Complex(0.0)) throw InvalidParameter("t = 0 leaves pC undetermined");
    pc = 1.0 - 2.0 * std::sqrt(kappa1 * kappa2) / kappa / value;
  }
  return {pc.real(), pc.imag()};
}

double sz_depletion_rate(double p, double g_ens, double gamma, double field_photon_number) {
  if (!(gamma > 0.0)) throw InvalidParameter("Gamma must be positive");
  return -4.0 * p * g_ens * g_ens * field_photon_number / gamma;
}

double photon_budget(double kappa, double kappa1, double pc, double total_spins) {
  if (!(kappa > 0.0 && kappa1 > 0.0)) throw InvalidParameter("kappa and kappa1 must be positive");
  if (pc == 0.0) return std::numeric_limits<double>::infinity();
  return kappa / kappa1 * (1.0 - pc) * (1.0 - pc) / (8.0 * std::abs(pc)) * total_spins;
}

Complex DrivenState::field() const { return modes[0] / std::numbers::sqrt2; }

Complex DrivenState::spin_lowering(int m) const { return 0.5 * modes[m + 1]; }

DrivenState driven_steady_state(const DriftModel& model, Complex beta0, double delta_e) {
  const Eigen::MatrixXcd k = mode_generator(model);
  const int n = static_cast<int>(k.rows());
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  // a_c picks up sqrt(2 kappa1) beta; the first mode amplitude is sqrt(2) a_c.
  b[0] = std::numbers::sqrt2 * std::sqrt(2.0 * model.params.kappa1) * beta0;
  const Eigen::MatrixXcd shifted = k + kI * delta_e * Eigen::MatrixXcd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(shifted);
  if (!lu.isInvertible()) throw NumericalFailure("driven steady state: K + i delta_e is singular");
  DrivenState s;
  s.modes = -lu.solve(b);
  return s;
}

double sz_drain_from_driven_state(const DriftModel& model, const DrivenState& state) {
  const Complex a = state.field();
  double rate = 0.0;
  for (int m = 0; m < model.grid.size(); ++m) {
    rate += 4.0 * model.grid.entries[m].coupling * (std::conj(state.spin_lowering(m)) * a).imag();
  }
  return rate;
}

double sz_drain_from_covariance(const DriftModel& model, const CovarianceMatrix& gamma) {
  if (gamma.rows() != model.dim() || gamma.cols() != model.dim()) {
    throw InvalidParameter("covariance does not match the model dimension");
  }
  double rate = 0.0;
  for (int m = 0; m < model.grid.size(); ++m) {
    const double sx_p = 0.5 * gamma(spin_x_index(m), kFieldP);
    const double sy_x = 0.5 * gamma(spin_y_index(m), kFieldX);
    rate += model.grid.entries[m].coupling * (sx_p + sy_x);
  }
  return std::numbers::sqrt2 * rate;
}

}  // namespace cavspin
