#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cavspin/csv.hpp"
#include "cavspin/errors.hpp"
#include "cavspin/experiments.hpp"

using namespace cavspin;

namespace {

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

double value(const CsvTable& t, std::size_t row, const std::string& name) { return t.rows.at(row).at(column(t, name)).value(); }

std::string summary(const CsvTable& t, const std::string& key) {
  for (const auto& [k, v] : t.summary) {
    if (k == key) return v;
  }
  FAIL("missing summary key " << key);
  return {};
}

RunConfig benchmark(double c) {
  RunConfig cfg;
  cfg.params = SystemParams::symmetric(4.0 / c, 0.0, 2.0);
  cfg.spec = BroadeningSpec::gaussian(std::sqrt(std::numbers::pi / 2.0));
  return cfg;
}

RunConfig homogeneous(Experiment e, double g, double c) {
  RunConfig cfg;
  cfg.experiment = e;
  cfg.params = SystemParams::symmetric(1.0, 0.0, g);
  cfg.spec = BroadeningSpec::homogeneous();
  cfg.normalize_gamma = true;
  cfg.cooperativity = c;
  return cfg;
}

std::string render(const ExperimentResult& r) {
  std::ostringstream os;
  write_csv(os, r.manifest, r.table);
  return os.str();
}

}  // namespace

TEST_CASE("configuration resolution") {
  RunConfig g = benchmark(1.0);
  g.spec.width = 3.0;
  g.normalize_gamma = true;
  CHECK(resolve(g).spec.width == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
  g.params.gamma_perp = 0.3;
  const RunConfig gd = resolve(g);
  CHECK(characteristic_width(gd.spec, 0.3) == doctest::Approx(1.0).epsilon(1e-10));

  RunConfig l;
  l.spec = BroadeningSpec::lorentzian(7.0);
  l.params = SystemParams::symmetric(2.0, 0.25, 1.0);
  l.normalize_gamma = true;
  CHECK(resolve(l).spec.width == doctest::Approx(1.5));

  RunConfig h = homogeneous(Experiment::Decay, 2.0, 0.5);
  h.params.kappa1 = 0.25;
  h.params.kappa2 = 0.75;
  const RunConfig hr = resolve(h);
  CHECK(hr.params.gamma_perp == 1.0);
  CHECK(hr.params.kappa == doctest::Approx(8.0));
  CHECK(hr.params.kappa1 == doctest::Approx(2.0));
  CHECK(hr.params.kappa2 == doctest::Approx(6.0));

  RunConfig bad = benchmark(0.5);
  bad.m = 400;
  CHECK_THROWS_AS(resolve(bad), InvalidParameter);
  RunConfig pole = benchmark(0.5);
  pole.experiment = Experiment::Pole;
  pole.spec = BroadeningSpec::lorentzian(2.0);
  CHECK_THROWS_AS(resolve(pole), InvalidParameter);
  RunConfig frac = benchmark(0.5);
  frac.p = 0.5;
  CHECK_THROWS_AS(resolve(frac), InvalidParameter);
  CHECK(parse_experiment("stability-sweep") == Experiment::StabilitySweep);
  CHECK_THROWS_AS(parse_experiment("nope"), InvalidParameter);
}

TEST_CASE("runs are deterministic and carry their manifest") {
  RunConfig cfg = benchmark(0.5);
  cfg.m = 101;
  cfg.t_samples = 21;
  const std::string a = render(run_decay(cfg));
  const std::string b = render(run_decay(cfg));
  CHECK(a == b);
  const ExperimentResult r = run_decay(cfg);
  for (const char* key : {"experiment", "family", "width", "m", "n_spins", "kappa", "kappa1", "kappa2", "gamma_perp",
                          "g_ens", "delta_cs", "p", "Gamma", "C", "t_max", "t_samples", "alpha"}) {
    CHECK_MESSAGE(r.manifest.get(key).has_value(), key);
  }
  CHECK(*r.manifest.get("experiment") == "decay");
  const auto json = nlohmann::json::parse(r.manifest.to_json());
  CHECK(json.at("kappa").get<std::string>() == *r.manifest.get("kappa"));
  CHECK(std::stod(*r.manifest.get("C")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.rfind("# experiment=decay\n", 0) == 0);
}

TEST_CASE("decay at threshold stays within a band") {
  RunConfig cfg = benchmark(1.0);
  const ExperimentResult r = run_decay(cfg);
  const double x0 = value(r.table, 0, "X_c_sim");
  for (std::size_t k = 0; k < r.table.rows.size(); ++k) {
    const double x = value(r.table, k, "X_c_sim") / x0;
    CHECK(x >= 0.1);
    CHECK(x <= 1.05);
  }
}

TEST_CASE("decay above threshold grows at the pole rate") {
  const ExperimentResult r = run_decay(benchmark(2.0));
  const std::size_t last = r.table.rows.size() - 1, mid = last - 20;
  const double rate = std::log(value(r.table, last, "X_c_sim") / value(r.table, mid, "X_c_sim")) /
                      (value(r.table, last, "t") - value(r.table, mid, "t"));
  const double pole = std::stod(summary(r.table, "pole_lambda_re"));
  CHECK(pole > 0.0);
  CHECK(rate == doctest::Approx(pole).epsilon(0.05));
}

TEST_CASE("homogeneous moments approach the closed-form steady state") {
  RunConfig cfg = homogeneous(Experiment::Moments, 1.0, 0.5);
  cfg.t_max = 40.0;
  cfg.t_samples = 81;
  const ExperimentResult r = run_moments(cfg);
  const double kappa = 2.0, gamma = 1.0, c = 0.5;
  const double expected = (1.0 + c * (kappa - gamma) / (kappa + gamma)) / (1.0 - c) - 1.0;
  CHECK(value(r.table, r.table.rows.size() - 1, "VarSx_over_N_minus_1") == doctest::Approx(expected).epsilon(1e-6));
  CHECK(summary(r.table, "relaxation_defined") == "true");
  CHECK(std::stod(summary(r.table, "ratio_VarSx_excess")) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(value(r.table, 0, "R") == doctest::Approx(1.0));
}

TEST_CASE("homogeneous moments above threshold grow") {
  RunConfig cfg = homogeneous(Experiment::Moments, 1.0, 2.0);
  const ExperimentResult r = run_moments(cfg);
  CHECK(summary(r.table, "relaxation_defined") == "false");
  CHECK(value(r.table, r.table.rows.size() - 1, "VarSx_over_N_minus_1") > 10.0 * value(r.table, 10, "VarSx_over_N_minus_1"));
  CHECK_FALSE(r.table.rows.back().at(column(r.table, "R")).has_value());
}

TEST_CASE("Gaussian moments exceed the homogeneous excess") {
  RunConfig cfg = benchmark(0.5);
  cfg.experiment = Experiment::Moments;
  const ExperimentResult r = run_moments(cfg);
  const double ratio = std::stod(summary(r.table, "ratio_VarSx_excess"));
  CHECK(ratio > 1.0);
  CHECK(ratio < 2.0);
}

TEST_CASE("spectrum at unit cooperativity halves the transmission") {
  RunConfig cfg = homogeneous(Experiment::Spectrum, 2.0, 1.0);
  cfg.p = -1.0;
  cfg.delta_e_min = -2.0;
  cfg.delta_e_max = 2.0;
  cfg.delta_e_samples = 5;
  const ExperimentResult r = run_spectrum(cfg);
  CHECK(value(r.table, 2, "delta_e") == 0.0);
  CHECK(value(r.table, 2, "re_t") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(value(r.table, 2, "im_t") == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(value(r.table, 1, "abs_t2") == doctest::Approx(value(r.table, 3, "abs_t2")).epsilon(1e-12));
}

TEST_CASE("stability sweeps") {
  SUBCASE("homogeneous verdicts agree away from threshold") {
    RunConfig cfg = homogeneous(Experiment::StabilitySweep, 1.0, 1.0);
    cfg.cooperativity.reset();
    cfg.g_samples = 6;
    cfg.kappa_samples = 6;
    const ExperimentResult r = run_stability_sweep(cfg);
    CHECK(r.table.rows.size() == 36);
    for (std::size_t k = 0; k < r.table.rows.size(); ++k) {
      if (std::abs(value(r.table, k, "C") - 1.0) < 1e-9) continue;
      CHECK(value(r.table, k, "stable_numeric") == value(r.table, k, "stable_analytic"));
      CHECK((value(r.table, k, "spectral_abscissa_discrete") < 0.0) == (value(r.table, k, "C") < 1.0));
    }
  }
  SUBCASE("windowed Gaussian verdicts") {
    RunConfig cfg = benchmark(1.0);
    cfg.experiment = Experiment::StabilitySweep;
    cfg.m = 201;
    cfg.g_min = cfg.g_max = 2.0;
    cfg.g_samples = 1;
    cfg.kappa_min = 0.8;  // C = 5
    cfg.kappa_max = 20.0; // C = 0.2
    cfg.kappa_samples = 2;
    const ExperimentResult r = run_stability_sweep(cfg);
    CHECK(*r.manifest.get("numeric_verdict") == "kick decay between t_max/2 and t_max");
    CHECK(value(r.table, 0, "stable_numeric") == 0.0);
    CHECK(value(r.table, 1, "stable_numeric") == 1.0);
  }
}

TEST_CASE("pole run reports the slow root") {
  RunConfig cfg = benchmark(0.5);
  cfg.experiment = Experiment::Pole;
  const ExperimentResult r = run_pole(cfg);
  CHECK(value(r.table, 0, "slow") == 1.0);
  CHECK(value(r.table, 0, "lambda_re") == doctest::Approx(-0.794234).epsilon(1e-5));
  CHECK(value(r.table, 0, "residual") <= 1e-10 * 8.0);
  CHECK(std::stod(summary(r.table, "kappa_c")) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("pole run far below threshold keeps the slow root") {
  RunConfig cfg = benchmark(0.05);
  cfg.experiment = Experiment::Pole;
  const ExperimentResult r = run_pole(cfg);
  REQUIRE(r.table.rows.size() == 1);
  CHECK(value(r.table, 0, "lambda_re") < 0.0);
  CHECK(summary(r.table, "fast_pole") == "seed outside the supported domain of w");
}
