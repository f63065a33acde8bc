#include "wqed/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "wqed/dynamics.hpp"
#include "wqed/ensemble.hpp"
#include "wqed/error.hpp"
#include "wqed/fit.hpp"
#include "wqed/scattering.hpp"
#include "wqed/trajectory.hpp"
#include "wqed/two_photon.hpp"

#ifndef WQED_VERSION
#define WQED_VERSION "0.0.0"
#endif

namespace wqed::cli {
namespace {

using nlohmann::json;

std::filesystem::path target(const CommandContext& ctx, const char* name) {
  return std::filesystem::path(ctx.out_dir) / name;
}

Table table(const CommandContext& ctx, const std::string& command, std::vector<std::string> columns) {
  Table t(std::move(columns));
  for (const auto& line : provenance(ctx, command)) t.comment(line);
  return t;
}

EnsembleSpec ensemble(const RunConfig& c) {
  EnsembleSpec spec;
  spec.noise = c.noise;
  return spec;
}

std::vector<double> grid(const LinearGrid& g) { return linspace(g.min, g.max, g.count); }
std::vector<double> log_grid(const LinearGrid& g) { return logspace(g.min, g.max, g.count); }

double to_ghz(double detuning, double gamma_rad) { return detuning * gamma_rad / (2.0 * std::numbers::pi); }

}  // namespace

std::vector<std::string> provenance(const CommandContext& ctx, const std::string& command) {
  json run{{"command", command}, {"seed", ctx.seed}, {"detuning", ctx.detuning}};
  return {std::string("wqed ") + WQED_VERSION, "config " + config_to_json(ctx.config).dump(),
          "run " + run.dump()};
}

std::vector<PendingFile> cmd_spectrum(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto det = grid(c.grids.detuning);
  const auto fano = fano_spectrum(c.emitter, c.cavity, det);
  const auto noisy = noisy_fano_spectrum(c.emitter, c.cavity, det, ensemble(c));

  Table t = table(ctx, "spectrum",
                  {"detuning_gamma", "detuning_ghz", "T_emitter", "T_fano", "T_fano_noise_averaged"});
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double bare = std::norm(emitter_amplitudes(c.emitter, det[i]).t);
    t.row({det[i], to_ghz(det[i], c.emitter.gamma_rad), bare, fano[i], noisy[i]});
  }
  return {{target(ctx, "spectrum.csv"), t.str()}};
}

std::vector<PendingFile> cmd_saturation(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto spec = ensemble(c);
  const auto flux = log_grid(c.grids.flux);

  Table t = table(ctx, "saturation",
                  {"flux_per_lifetime", "power_nW", "T_bare", "T_noise_averaged", "T_coherent",
                   "T_incoherent"});
  const double weak = noisy_weak_transmission(c.emitter, ctx.detuning, spec).value;
  t.comment("n_c_deconvolved " + num(critical_flux(c.emitter)));
  t.comment("switching_energy_aJ " +
            num(units::switching_energy_aj(critical_flux(c.emitter), c.conversion.wavelength_nm)));
  t.comment("weak_dip_noise_averaged_percent " + num(100.0 * (1.0 - weak)));
  for (double n : flux) {
    const DriveSpec d{ctx.detuning, n};
    const auto bare = transmission(build_model(c.emitter, d), d);
    const double avg = noisy_transmission(c.emitter, d, spec).value;
    t.row({n, units::flux_to_power(n, c.emitter.gamma_rad, c.conversion), bare.total, avg, bare.coherent,
           bare.incoherent});
  }
  return {{target(ctx, "saturation.csv"), t.str()}};
}

std::vector<PendingFile> cmd_g2(const CommandContext& ctx, double flux) {
  const auto& c = ctx.config;
  const DriveSpec d{ctx.detuning, flux};
  validate(d);
  if (flux <= 0.0) fail(ErrorCode::DivisionByZeroFlux, "g2 needs a positive flux");
  const auto tau = grid(c.grids.tau);
  const auto model = build_model(c.emitter, d);
  const auto raw = g2_values(model, tau);
  const auto noisy = noisy_g2_trace(c.emitter, d, tau, ensemble(c));
  const auto detected = detector_convolve(noisy.trace, c.detector);

  const double zero = 0.0;
  const double raw0 = g2_values(model, {&zero, 1})[0];
  const double noisy0 = noisy_g2_trace(c.emitter, d, {&zero, 1}, ensemble(c)).trace.values[0];

  Table t = table(ctx, "g2", {"tau_ns", "g2_raw", "g2_noise_averaged", "g2_detected"});
  t.comment("flux_per_lifetime " + num(flux));
  t.comment("g2_zero_raw " + num(raw0));
  t.comment("g2_zero_noise_averaged " + num(noisy0));
  t.comment("quadrature_order " + num(static_cast<double>(noisy.order)));
  for (std::size_t i = 0; i < tau.size(); ++i) t.row({tau[i], raw[i], noisy.trace.values[i], detected.values[i]});
  return {{target(ctx, "g2.csv"), t.str()}};
}

std::vector<PendingFile> cmd_g2_power_sweep(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto spec = ensemble(c);
  const double zero = 0.0;
  Table t = table(ctx, "g2-power-sweep",
                  {"flux_per_lifetime", "power_nW", "g2_zero_raw", "g2_zero_noise_averaged"});
  for (double n : log_grid(c.grids.flux)) {
    const DriveSpec d{ctx.detuning, n};
    const double raw = g2_values(build_model(c.emitter, d), {&zero, 1})[0];
    const double avg = noisy_g2_trace(c.emitter, d, {&zero, 1}, spec).trace.values[0];
    t.row({n, units::flux_to_power(n, c.emitter.gamma_rad, c.conversion), raw, avg});
  }
  return {{target(ctx, "g2_power_sweep.csv"), t.str()}};
}

std::vector<PendingFile> cmd_bound_state(const CommandContext& ctx, const BoundStateOptions& o) {
  const auto& c = ctx.config;
  const auto spec = ensemble(c);
  if (o.vs == "beta") {
    if (o.beta_points < 2) fail(ErrorCode::OutOfRange, "--beta-points must be >= 2");
    Table t = table(ctx, "bound-state", {"beta", "fraction", "fraction_noise_averaged"});
    for (double b : linspace(0.0, 1.0, o.beta_points)) {
      EmitterParams e = c.emitter;
      e.beta = b;
      if (b == 0.0) {
        // No coupling, nothing is scattered into the bound part.
        t.row({b, 0.0, 0.0});
        continue;
      }
      t.row({b, bound_state_fraction(e, ctx.detuning), noisy_bound_state_fraction(e, ctx.detuning, spec)});
    }
    return {{target(ctx, "bound_state_vs_beta.csv"), t.str()}};
  }
  if (o.vs == "detuning") {
    Table t = table(ctx, "bound-state",
                    {"detuning_gamma", "detuning_ghz", "fraction", "fraction_noise_averaged"});
    for (double dd : grid(c.grids.detuning)) {
      t.row({dd, to_ghz(dd, c.emitter.gamma_rad), bound_state_fraction(c.emitter, dd),
             noisy_bound_state_fraction(c.emitter, dd, spec)});
    }
    return {{target(ctx, "bound_state_vs_detuning.csv"), t.str()}};
  }
  fail(ErrorCode::OutOfRange, "--vs must be 'beta' or 'detuning'");
}

std::vector<PendingFile> cmd_fit(const CommandContext& ctx, const FitCommandOptions& o) {
  const auto& c = ctx.config;
  const DatasetKind kind = dataset_kind_from_string(o.kind);
  Dataset data = read_dataset_csv(o.data_path, kind);
  data.conversion = c.conversion;
  validate(data);

  FitResult r;
  if (kind == DatasetKind::Saturation) {
    SaturationFitOptions fo;
    fo.gamma_rad = c.emitter.gamma_rad;
    fo.initial = {c.emitter.beta, c.noise.sigma, c.noise.alpha, c.emitter.gamma_deph / c.emitter.gamma_rad};
    for (const auto& name : o.fix) {
      if (name == "beta") fo.free.beta = false;
      else if (name == "sigma") fo.free.sigma = false;
      else if (name == "alpha") fo.free.alpha = false;
      else if (name == "gamma_deph_over_gamma") fo.free.dephasing = false;
      else fail(ErrorCode::OutOfRange, "unknown saturation parameter '" + name + "' in --fix");
    }
    r = fit_saturation(data, fo);
  } else if (kind == DatasetKind::Spectrum) {
    if (!o.fix.empty()) fail(ErrorCode::OutOfRange, "--fix is only supported for saturation fits");
    FanoFitOptions fo;
    fo.emitter = c.emitter;
    fo.initial.reflectivity = std::clamp(0.5 * (c.cavity.r_left + c.cavity.r_right), 0.0, 0.95);
    fo.initial.phi_left = c.cavity.phi_left;
    fo.initial.phi_right = c.cavity.phi_right;
    fo.initial.phase_dispersion = c.cavity.phase_dispersion;
    fo.initial.beta = c.emitter.beta;
    r = fit_fano(data, fo);
  } else {
    fail(ErrorCode::OutOfRange, "fitting is supported for 'saturation' and 'spectrum' datasets");
  }

  json params = json::array();
  for (const auto& p : r.params) {
    params.push_back({{"name", p.name},
                      {"value", p.value},
                      {"uncertainty", std::isfinite(p.uncertainty) ? json(p.uncertainty) : json(nullptr)},
                      {"free", p.free}});
  }
  json doc{{"meta",
            {{"version", WQED_VERSION},
             {"config", config_to_json(c)},
             {"data", o.data_path},
             {"kind", o.kind},
             {"fixed", o.fix}}},
           {"params", params},
           {"residual_norm", r.residual_norm},
           {"residual_per_point", r.residual_per_point},
           {"n_evaluations", r.n_evaluations},
           {"converged", r.converged},
           {"unidentifiable", r.unidentifiable},
           {"warnings", r.warnings},
           {"derived", r.derived}};
  return {{target(ctx, "fit.json"), doc.dump(2) + "\n"}};
}

std::vector<PendingFile> cmd_oracle(const CommandContext& ctx, const OracleCommandOptions& o) {
  const auto& c = ctx.config;
  const DriveSpec d{ctx.detuning, o.flux};
  validate(d);
  if (o.flux <= 0.0) fail(ErrorCode::DivisionByZeroFlux, "oracle needs a positive flux");
  const auto model = build_model(c.emitter, d);
  TrajectoryOptions to;
  to.duration = o.duration;
  to.batches = o.batches;
  to.seed = ctx.seed;
  const auto r = trajectory_oracle(model, d, to);

  const double t_reg = transmission(model, d).total;
  const double g_reg = regression_bin_average(model, r.bin_width);
  const auto& h = r.g2_histogram;
  const auto reg = g2_values(model, h.tau);

  Table t = table(ctx, "oracle", {"tau_ns", "g2_trajectory", "g2_trajectory_se", "g2_regression"});
  t.comment("flux_per_lifetime " + num(o.flux) + " duration_ns " + num(o.duration) + " batches " +
            num(o.batches));
  t.comment("T_trajectory " + num(r.transmission) + " se " + num(r.transmission_se) + " T_regression " +
            num(t_reg) + " z " + num((r.transmission - t_reg) / r.transmission_se));
  t.comment("g2_first_bin_trajectory " + num(r.g2_zero) + " se " + num(r.g2_zero_se) +
            " g2_first_bin_regression " + num(g_reg) + " z " + num((r.g2_zero - g_reg) / r.g2_zero_se));
  t.comment("bin_width_ns " + num(r.bin_width) + " forward_clicks " +
            num(static_cast<double>(r.forward_clicks)));
  for (std::size_t i = 0; i < h.tau.size(); ++i) t.row({h.tau[i], h.values[i], r.g2_se[i], reg[i]});
  return {{target(ctx, "oracle.csv"), t.str()}};
}

}  // namespace wqed::cli
