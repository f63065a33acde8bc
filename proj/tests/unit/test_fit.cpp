#include "doctest.h"

#include <cmath>
#include <random>

#include "wqed/dynamics.hpp"
#include "wqed/error.hpp"
#include "wqed/fit.hpp"

using namespace wqed;

namespace {

Dataset synthetic_saturation(const SaturationParams& p, double noise, std::uint64_t seed) {
  Dataset d;
  d.kind = DatasetKind::Saturation;
  d.x = logspace(0.01, 200.0, 30);
  std::vector<double> flux;
  for (double pw : d.x) flux.push_back(units::power_to_flux(pw, 2.5, d.conversion));
  d.y = saturation_model(p, 2.5, flux, *gauss_hermite(641));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, noise);
  if (noise > 0.0)
    for (double& y : d.y) y += n(rng);
  return d;
}

}  // namespace

TEST_CASE("minimizer finds the bottom of a shifted bowl") {
  const Objective f = [](const std::vector<double>& x) {
    return (x[0] - 1.5) * (x[0] - 1.5) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5);
  };
  const auto r = minimize(f, {0.0, 0.0}, {Bound{}, Bound{}});
  CHECK(r.converged());
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("minimizer solves Rosenbrock") {
  const Objective f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = minimize(f, {-1.2, 1.0}, {Bound{-5.0, 5.0}, Bound{-5.0, 5.0}});
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("bounds are honoured when the optimum lies outside") {
  const Objective f = [](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0); };
  const auto r = minimize(f, {0.5}, {Bound{0.0, 1.0}});
  CHECK(r.x[0] <= 1.0);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("non-finite objective is reported") {
  const Objective f = [](const std::vector<double>& x) {
    return x[0] > 0.2 ? std::nan("") : x[0] * x[0];
  };
  try {
    minimize(f, {0.19}, {Bound{}});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteObjective);
  }
}

TEST_CASE("evaluation budget yields a non-converged best point") {
  const Objective f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  MinimizeOptions o;
  o.max_evaluations = 30;
  const auto r = minimize(f, {-1.2, 1.0}, {Bound{}, Bound{}}, o);
  CHECK_FALSE(r.converged());
  CHECK(r.evaluations <= 30);
  CHECK(r.value < f({-1.2, 1.0}));
}

TEST_CASE("curvature flags a direction the objective cannot see") {
  const Objective f = [](const std::vector<double>& x) { return std::pow(x[0] + x[1] - 1.0, 2); };
  const auto ci = curvature_uncertainties(f, {0.5, 0.5}, {Bound{}, Bound{}}, 10, false);
  CHECK(ci.rank_deficient);
  CHECK(ci.unidentified[0]);
  CHECK(ci.unidentified[1]);

  const Objective g = [](const std::vector<double>& x) { return x[0] * x[0] / 0.04 + x[1] * x[1] / 0.09; };
  const auto cg = curvature_uncertainties(g, {0.0, 0.0}, {Bound{}, Bound{}}, 10, false);
  CHECK_FALSE(cg.rank_deficient);
  CHECK(cg.sigma[0] == doctest::Approx(0.2).epsilon(1e-4));
  CHECK(cg.sigma[1] == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("dataset parsing") {
  const auto d = parse_dataset_csv("# power, T\n0.1, 0.9\n\n1.0,0.8\n  10 , 0.95 \n", DatasetKind::Saturation);
  CHECK(d.x == std::vector<double>{0.1, 1.0, 10.0});
  CHECK(d.y == std::vector<double>{0.9, 0.8, 0.95});
  CHECK(d.y_err.empty());
  const auto e = parse_dataset_csv("1,2,0.1\n2,3,0.2\n", DatasetKind::Spectrum);
  CHECK(e.y_err.size() == 2);

  auto code = [](const std::string& text) {
    try {
      parse_dataset_csv(text, DatasetKind::Saturation);
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code("1,2\n0.5,3\n") == ErrorCode::InvalidDataset);
  CHECK(code("1,abc\n2,3\n") == ErrorCode::InvalidDataset);
  CHECK(code("1,2\n2,3,4\n") == ErrorCode::InvalidDataset);
  CHECK(code("1,2\n") == ErrorCode::InvalidDataset);
  CHECK(code("1,2,0\n2,3,1\n") == ErrorCode::InvalidDataset);
  CHECK_THROWS_AS(read_dataset_csv("/nonexistent/data.csv", DatasetKind::Saturation), Error);
  CHECK(dataset_kind_from_string(to_string(DatasetKind::G2)) == DatasetKind::G2);
}

TEST_CASE("saturation fit recovers beta and dephasing with the noise known") {
  const SaturationParams truth;
  const auto data = synthetic_saturation(truth, 0.0, 0);
  SaturationFitOptions o;
  o.initial = {0.7, 3.6, 0.43, 1.0};
  o.free.sigma = false;
  o.free.alpha = false;
  const auto r = fit_saturation(data, o);
  CHECK(r.converged);
  CHECK_FALSE(r.unidentifiable);
  CHECK(r.param("beta").value == doctest::Approx(truth.beta).epsilon(0.01));
  CHECK(r.param("gamma_deph_over_gamma").value == doctest::Approx(truth.dephasing_over_gamma).epsilon(0.01));
  CHECK(r.param("beta").uncertainty > 0.0);
  CHECK(r.derived.at("n_c") > 0.0);
  CHECK(r.derived.at("switching_energy_aJ") ==
        doctest::Approx(units::switching_energy_aj(r.derived.at("n_c"), 940.0)));
}

TEST_CASE("four free parameters fit the curve but are flagged") {
  const auto data = synthetic_saturation(SaturationParams{}, 0.0, 0);
  SaturationFitOptions o;
  o.initial = {0.7, 2.5, 0.3, 1.0};
  const auto r = fit_saturation(data, o);
  CHECK(r.residual_norm < 1e-9);
  CHECK(r.unidentifiable);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("fixed parameters stay put and beta fixed at zero is rejected") {
  const auto data = synthetic_saturation(SaturationParams{}, 0.0, 0);
  SaturationFitOptions o;
  o.free.sigma = false;
  o.free.alpha = false;
  const auto r = fit_saturation(data, o);
  CHECK(r.param("sigma").value == 3.6);
  CHECK_FALSE(r.param("sigma").free);
  CHECK(r.param("sigma").uncertainty == 0.0);

  o.free.beta = false;
  o.initial.beta = 0.0;
  try {
    fit_saturation(data, o);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoContrast);
  }
}

TEST_CASE("Fano fit reproduces its own model") {
  const EmitterParams e;
  const FanoParams truth{0.3, 0.4, 1.2, 0.0, 0.1, 0.95, 0.85};
  Dataset d;
  d.kind = DatasetKind::Spectrum;
  d.x = linspace(-3.0, 3.0, 121);
  d.y = fano_model(truth, e, d.x);
  FanoFitOptions o;
  o.emitter = e;
  o.initial = {0.25, 0.3, 1.0, 0.0, 0.0, 1.0, 0.8};
  const auto r = fit_fano(d, o);
  CHECK(r.residual_per_point < 1e-6);
  const auto model = fano_model({r.param("reflectivity").value, r.param("phi_left").value,
                                 r.param("phi_right").value, r.param("phase_dispersion").value,
                                 r.param("offset_ghz").value, r.param("scale").value,
                                 r.param("beta").value},
                                e, d.x);
  for (std::size_t i = 0; i < d.x.size(); ++i) CHECK(model[i] == doctest::Approx(d.y[i]).epsilon(2e-3));
}

TEST_CASE("bare Lorentzian dip fits with vanishing mirrors") {
  const EmitterParams e;
  Dataset d;
  d.kind = DatasetKind::Spectrum;
  d.x = linspace(-3.0, 3.0, 121);
  d.y = fano_model(FanoParams{0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.85}, e, d.x);
  FanoFitOptions o;
  o.emitter = e;
  o.initial = {0.1, 0.5, 0.5, 0.0, 0.05, 1.0, 0.8};
  const auto r = fit_fano(d, o);
  CHECK(r.param("reflectivity").value < 0.01);
  CHECK(r.param("beta").value == doctest::Approx(0.85).epsilon(0.01));
}

TEST_CASE("flat spectrum leaves the emitter unidentifiable") {
  const EmitterParams e;
  Dataset d;
  d.kind = DatasetKind::Spectrum;
  d.x = linspace(-3.0, 3.0, 61);
  d.y.assign(d.x.size(), 0.9);
  FanoFitOptions o;
  o.emitter = e;
  o.initial = {0.1, 0.5, 0.5, 0.0, 0.0, 1.0, 0.3};
  const auto r = fit_fano(d, o);
  CHECK(r.unidentifiable);
  bool flagged = false;
  for (const auto& w : r.warnings) flagged = flagged || w.find("Unidentifiable") != std::string::npos;
  CHECK(flagged);
}
