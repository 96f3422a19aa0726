#pragma once

#include <vector>

#include <Eigen/Core>

#include "cavspin/broadening.hpp"
#include "cavspin/model.hpp"

namespace cavspin {

/// Coherent drive beta(t) = beta0 exp(-i delta_e t) on the input mirror.
/// |beta0|^2 is the incoming photon flux. p is +1 (inverted) or -1; values
/// in between are accepted as a heuristic partial polarization.
struct ProbeConfig {
  Complex beta0{1.0, 0.0};
  double delta_e = 0.0;
  double p = -1.0;
};

/// Steady driven <a_c> in the frame of the drive. Requires delta_cs = 0.
/// Throws UnstableModel for an inverted sample with p C >= 1.
Complex driven_field(const SystemParams& params, const BroadeningSpec& spec, const ProbeConfig& probe);

struct ReflectionTransmission {
  Complex r;
  Complex t;
};

ReflectionTransmission reflection_transmission(const SystemParams& params, const BroadeningSpec& spec,
                                               const ProbeConfig& probe);

struct SpectrumRow {
  double delta_e = 0.0;
  Complex r;
  Complex t;
  double abs_r2 = 0.0;
  double abs_t2 = 0.0;
  bool valid = true;  // false when the row violates a precondition; values are then zero
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
};

SpectrumTable spectrum_scan(const SystemParams& params, const BroadeningSpec& spec, double p,
                            const std::vector<double>& delta_e_grid);

enum class ProbeQuantity { Reflection, Transmission };

struct PcEstimate {
  double pc = 0.0;
  double imag_residual = 0.0;  // vanishes for resonant data
};

/// p C from a resonant reflection or transmission coefficient.
PcEstimate estimate_pc(Complex value, ProbeQuantity which, double kappa1, double kappa2);

/// dS_z/dt = -4 p g_ens^2 |a_c|^2 / Gamma.
double sz_depletion_rate(double p, double g_ens, double gamma, double field_photon_number);

/// (kappa / kappa1) (1 - pC)^2 / (8 |pC|) N; +infinity (no bound) when pC = 0.
double photon_budget(double kappa, double kappa1, double pc, double total_spins);

/// Steady driven state of the discretized model in the frame of the drive,
/// as complex mode amplitudes c = (X_c + i P_c, S_x^(m) - i S_y^(m)).
struct DrivenState {
  Eigen::VectorXcd modes;
  Complex field() const;                 // <a_c>
  Complex spin_lowering(int m) const;    // <S_-^(m)>
};

DrivenState driven_steady_state(const DriftModel& model, Complex beta0, double delta_e);

/// sum_m dS_z^(m)/dt with the factorized mean-field products of a driven state.
double sz_drain_from_driven_state(const DriftModel& model, const DrivenState& state);

/// The same drain in the undriven case, built from second moments.
double sz_drain_from_covariance(const DriftModel& model, const CovarianceMatrix& gamma);

}  // namespace cavspin
