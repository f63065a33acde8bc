#pragma once

// Run configuration for the command line tool. Every field is optional in
// the JSON document; defaults are the reference parameter set.

#include <cstddef>
#include <string>

#include "json.hpp"
#include "wqed/params.hpp"

namespace wqed::cli {

struct LinearGrid {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;
};

struct Grids {
  LinearGrid detuning{-10.0, 10.0, 401};  // units of gamma_rad
  LinearGrid flux{1e-3, 1e3, 61};         // log spaced, photons per lifetime
  LinearGrid tau{-8.0, 8.0, 1001};        // ns
};

struct RunConfig {
  EmitterParams emitter{2.5, 0.85, 0.79 * 2.5};
  NoiseModel noise{3.6, 0.43};
  CavityBackground cavity;
  DetectorModel detector;
  PowerConversion conversion;
  Grids grids;
};

/// Throws Error(OutOfRange) for unknown keys, wrong types or invalid values.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Reads and validates a config file; Error(Io) if it cannot be opened.
RunConfig load_config(const std::string& path);

void validate(const RunConfig& c);

}  // namespace wqed::cli
