#include "wqed/cli.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wqed/commands.hpp"
#include "wqed/error.hpp"

#ifndef WQED_VERSION
#define WQED_VERSION "0.0.0"
#endif

namespace wqed::cli {
namespace {

struct GridOverrides {
  std::optional<double> detuning_min, detuning_max, flux_min, flux_max, tau_min, tau_max;
  std::optional<std::size_t> detuning_points, flux_points, tau_points;

  void apply(Grids& g) const {
    if (detuning_min) g.detuning.min = *detuning_min;
    if (detuning_max) g.detuning.max = *detuning_max;
    if (detuning_points) g.detuning.count = *detuning_points;
    if (flux_min) g.flux.min = *flux_min;
    if (flux_max) g.flux.max = *flux_max;
    if (flux_points) g.flux.count = *flux_points;
    if (tau_min) g.tau.min = *tau_min;
    if (tau_max) g.tau.max = *tau_max;
    if (tau_points) g.tau.count = *tau_points;
  }
};

const char* category(int code) {
  switch (code) {
    case kValidation: return "validation";
    case kNumerical: return "numerical";
    case kIo: return "io";
    default: return "ok";
  }
}

int report(std::ostream& err, bool as_json, int code, const std::string& kind, const std::string& message) {
  if (as_json) {
    nlohmann::json j{{"error", {{"exit_code", code}, {"category", category(code)}, {"code", kind},
                                {"message", message}}}};
    err << j.dump() << "\n";
  } else {
    err << "wqed: error (" << kind << "): " << message << "\n";
  }
  return code;
}

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::Io) return kIo;
  return e.is_validation() ? kValidation : kNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Waveguide QED model curves for a quantum dot in a nanophotonic waveguide", "wqed"};
  app.set_version_flag("--version", std::string("wqed ") + WQED_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  CommandContext ctx;
  bool json_errors = false;
  GridOverrides grids;
  app.add_option("--config", config_path, "RunConfig JSON file; defaults apply when omitted");
  app.add_option("--out", ctx.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", ctx.seed, "Random seed for stochastic subcommands")->capture_default_str();
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on stderr");
  app.add_option("--detuning", ctx.detuning, "Laser detuning in units of gamma_rad")->capture_default_str();
  app.add_option("--detuning-min", grids.detuning_min, "Detuning grid start, units of gamma_rad");
  app.add_option("--detuning-max", grids.detuning_max, "Detuning grid end");
  app.add_option("--detuning-points", grids.detuning_points, "Detuning grid size");
  app.add_option("--flux-min", grids.flux_min, "Lowest flux, photons per lifetime");
  app.add_option("--flux-max", grids.flux_max, "Highest flux");
  app.add_option("--flux-points", grids.flux_points, "Flux grid size (log spaced)");
  app.add_option("--tau-min", grids.tau_min, "First delay, ns");
  app.add_option("--tau-max", grids.tau_max, "Last delay, ns");
  app.add_option("--tau-points", grids.tau_points, "Delay grid size");

  std::function<std::vector<PendingFile>()> command;

  auto* spectrum = app.add_subcommand("spectrum", "Fano transmission spectrum vs detuning");
  spectrum->callback([&] { command = [&] { return cmd_spectrum(ctx); }; });

  auto* saturation = app.add_subcommand("saturation", "Transmission vs flux and power");
  saturation->callback([&] { command = [&] { return cmd_saturation(ctx); }; });

  double g2_flux = 1e-3;
  auto* g2 = app.add_subcommand("g2", "Correlation trace: raw, noise-averaged, detected");
  g2->add_option("--flux", g2_flux, "Photons per lifetime")->capture_default_str();
  g2->callback([&] { command = [&] { return cmd_g2(ctx, g2_flux); }; });

  auto* sweep = app.add_subcommand("g2-power-sweep", "g2(0) vs flux");
  sweep->callback([&] { command = [&] { return cmd_g2_power_sweep(ctx); }; });

  BoundStateOptions bs;
  auto* bound = app.add_subcommand("bound-state", "Two-photon bound-state fraction");
  bound->add_option("--vs", bs.vs, "beta or detuning")->capture_default_str();
  bound->add_option("--beta-points", bs.beta_points)->capture_default_str();
  bound->callback([&] { command = [&] { return cmd_bound_state(ctx, bs); }; });

  FitCommandOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit a dataset CSV, write fit.json");
  fit->add_option("--data", fo.data_path, "Dataset CSV (x, y[, y_err])")->required();
  fit->add_option("--kind", fo.kind, "saturation or spectrum")->capture_default_str();
  fit->add_option("--fix", fo.fix, "Parameters held at their config value")->delimiter(',');
  fit->callback([&] { command = [&] { return cmd_fit(ctx, fo); }; });

  OracleCommandOptions oo;
  auto* oracle = app.add_subcommand("oracle", "Quantum-jump trajectory cross-check");
  oracle->add_option("--flux", oo.flux)->capture_default_str();
  oracle->add_option("--duration", oo.duration, "Simulated time, ns")->capture_default_str();
  oracle->add_option("--batches", oo.batches)->capture_default_str();
  oracle->callback([&] { command = [&] { return cmd_oracle(ctx, oo); }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report(err, json_errors, kValidation, "Usage", e.what());
  }

  try {
    ctx.config = config_path.empty() ? RunConfig{} : load_config(config_path);
    grids.apply(ctx.config.grids);
    validate(ctx.config);
    const auto files = command();
    commit(files);
    return kOk;
  } catch (const Error& e) {
    return report(err, json_errors, exit_code_for(e), std::string(to_string(e.code())), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report(err, json_errors, kIo, "Io", e.what());
  } catch (const std::exception& e) {
    return report(err, json_errors, kNumerical, "Internal", e.what());
  }
}

}  // namespace wqed::cli
