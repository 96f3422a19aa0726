#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavspin/errors.hpp"
#include "cavspin/experiments.hpp"

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace cavspin;

  CLI::App app{"Inverted spin ensemble in a cavity: kick decay, moments, spectra, stability sweeps and poles."};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_path;
  std::string family = "gaussian";
  double width = cfg.spec.width;
  double kappa = cfg.params.kappa;
  double kappa1 = -1.0;
  double kappa2 = -1.0;
  double cooperativity = 0.0;

  app.add_option("--out", out_path, "CSV output path (stdout if omitted); a .json manifest is written next to it");
  app.add_option("--family", family, "homogeneous | lorentzian | gaussian")
      ->check(CLI::IsMember({"homogeneous", "lorentzian", "gaussian"}));
  app.add_option("--width", width, "Lorentzian FWHM or Gaussian standard deviation");
  app.add_option("--m", cfg.m, "number of sub-ensembles (odd)");
  app.add_option("--n-spins", cfg.n_spins, "total spin number N");
  app.add_option("--kappa", kappa, "total cavity decay rate");
  app.add_option("--kappa1", kappa1, "input mirror rate (default kappa/2)");
  app.add_option("--kappa2", kappa2, "output mirror rate (default kappa - kappa1)");
  app.add_option("--gamma-perp", cfg.params.gamma_perp, "spin dephasing rate");
  app.add_option("--g-ens", cfg.params.g_ens, "ensemble coupling");
  app.add_option("--delta-cs", cfg.params.delta_cs, "cavity-spin detuning");
  app.add_option("--p", cfg.p, "inversion: +1 inverted, -1 ground state");
  app.add_option("--t-max", cfg.t_max, "end of the time window");
  app.add_option("--t-samples", cfg.t_samples, "number of output times");
  app.add_option("--alpha", cfg.alpha, "field kick amplitude");
  app.add_option("--theta", cfg.theta, "spin tilt angle");
  app.add_option("--delta-e-min", cfg.delta_e_min, "drive detuning grid start");
  app.add_option("--delta-e-max", cfg.delta_e_max, "drive detuning grid end");
  app.add_option("--delta-e-samples", cfg.delta_e_samples, "drive detuning grid size");
  app.add_option("--g-min", cfg.g_min, "sweep: smallest g_ens");
  app.add_option("--g-max", cfg.g_max, "sweep: largest g_ens");
  app.add_option("--g-samples", cfg.g_samples, "sweep: number of g_ens values");
  app.add_option("--kappa-min", cfg.kappa_min, "sweep: smallest kappa");
  app.add_option("--kappa-max", cfg.kappa_max, "sweep: largest kappa");
  app.add_option("--kappa-samples", cfg.kappa_samples, "sweep: number of kappa values");
  app.add_flag("--normalize-gamma", cfg.normalize_gamma, "rescale the width so that Gamma = 1");
  auto* coop = app.add_option("--cooperativity", cooperativity, "set kappa = g_ens^2 / (C Gamma)");

  const std::pair<Experiment, const char*> subcommands[] = {
      {Experiment::Decay, "cavity field after a kick, simulated and in closed form"},
      {Experiment::Moments, "tilted inverted spins: means, collective variances, R(t)"},
      {Experiment::Spectrum, "driven reflection and transmission versus drive detuning"},
      {Experiment::StabilitySweep, "analytic and numerical stability over a (g_ens, kappa) grid"},
      {Experiment::Pole, "roots of the Gaussian pole equation"},
  };
  for (const auto& [e, description] : subcommands) {
    auto* sub = app.add_subcommand(std::string(to_string(e)), description);
    sub->fallthrough();
    sub->callback([&cfg, e] { cfg.experiment = e; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.spec = BroadeningSpec{parse_family(family), family == "homogeneous" ? 0.0 : width};
    cfg.params.kappa = kappa;
    cfg.params.kappa1 = kappa1 >= 0.0 ? kappa1 : (kappa2 >= 0.0 ? kappa - kappa2 : 0.5 * kappa);
    cfg.params.kappa2 = kappa2 >= 0.0 ? kappa2 : kappa - cfg.params.kappa1;
    if (coop->count() > 0) cfg.cooperativity = cooperativity;

    const ExperimentResult result = run_experiment(cfg);
    if (out_path.empty()) {
      write_csv(std::cout, result.manifest, result.table);
    } else {
      std::ofstream csv(out_path);
      if (!csv) throw InvalidParameter("cannot open " + out_path + " for writing");
      write_csv(csv, result.manifest, result.table);
      std::ofstream json(out_path + ".json");
      if (!json) throw InvalidParameter("cannot open " + out_path + ".json for writing");
      json << result.manifest.to_json();
    }
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return 0;
}
