#pragma once

// Subcommand bodies. Each builds its outputs in memory and returns them; the
// caller commits them to disk only when every step succeeded.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wqed/config.hpp"
#include "wqed/output.hpp"

namespace wqed::cli {

struct CommandContext {
  RunConfig config;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double detuning = 0.0;  // laser detuning, units of gamma_rad
};

std::vector<PendingFile> cmd_spectrum(const CommandContext& ctx);
std::vector<PendingFile> cmd_saturation(const CommandContext& ctx);
std::vector<PendingFile> cmd_g2(const CommandContext& ctx, double flux);
std::vector<PendingFile> cmd_g2_power_sweep(const CommandContext& ctx);

struct BoundStateOptions {
  std::string vs = "beta";
  std::size_t beta_points = 101;
};
std::vector<PendingFile> cmd_bound_state(const CommandContext& ctx, const BoundStateOptions& o);

struct FitCommandOptions {
  std::string data_path;
  std::string kind = "saturation";
  std::vector<std::string> fix;
};
std::vector<PendingFile> cmd_fit(const CommandContext& ctx, const FitCommandOptions& o);

struct OracleCommandOptions {
  double flux = 0.5;
  double duration = 20000.0;
  int batches = 64;
};
std::vector<PendingFile> cmd_oracle(const CommandContext& ctx, const OracleCommandOptions& o);

/// Header lines shared by every table: tool version and resolved config.
std::vector<std::string> provenance(const CommandContext& ctx, const std::string& command);

}  // namespace wqed::cli
