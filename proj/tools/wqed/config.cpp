#include "wqed/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wqed/error.hpp"

namespace wqed::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(ErrorCode::OutOfRange, std::string(where) + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) fail(ErrorCode::OutOfRange, "unknown key '" + key + "' in " + where);
  }
}

void read(const json& j, const char* key, double& dst) {
  if (!j.contains(key)) return;
  if (!j[key].is_number()) fail(ErrorCode::OutOfRange, std::string(key) + " must be a number");
  dst = j[key].get<double>();
}

void read(const json& j, const char* key, LinearGrid& dst) {
  if (!j.contains(key)) return;
  const json& g = j[key];
  if (!g.is_array() || g.size() != 3 || !g[0].is_number() || !g[1].is_number() ||
      !g[2].is_number_integer())
    fail(ErrorCode::OutOfRange, std::string("grid '") + key + "' must be [min, max, count]");
  if (g[2].get<long long>() < 2) fail(ErrorCode::OutOfRange, std::string("grid '") + key + "' count must be >= 2");
  dst = {g[0].get<double>(), g[1].get<double>(), g[2].get<std::size_t>()};
}

json grid_json(const LinearGrid& g) { return json::array({g.min, g.max, g.count}); }

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config", {"emitter", "noise", "cavity", "detector", "conversion", "grids"});
  if (j.contains("emitter")) {
    const json& e = j["emitter"];
    check_keys(e, "emitter", {"gamma_rad", "beta", "gamma_deph"});
    read(e, "gamma_rad", c.emitter.gamma_rad);
    read(e, "beta", c.emitter.beta);
    read(e, "gamma_deph", c.emitter.gamma_deph);
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    check_keys(n, "noise", {"sigma", "alpha"});
    read(n, "sigma", c.noise.sigma);
    read(n, "alpha", c.noise.alpha);
  }
  if (j.contains("cavity")) {
    const json& k = j["cavity"];
    check_keys(k, "cavity", {"r_left", "r_right", "phi_left", "phi_right", "phase_dispersion"});
    read(k, "r_left", c.cavity.r_left);
    read(k, "r_right", c.cavity.r_right);
    read(k, "phi_left", c.cavity.phi_left);
    read(k, "phi_right", c.cavity.phi_right);
    read(k, "phase_dispersion", c.cavity.phase_dispersion);
  }
  if (j.contains("detector")) {
    check_keys(j["detector"], "detector", {"jitter_sigma"});
    read(j["detector"], "jitter_sigma", c.detector.jitter_sigma);
  }
  if (j.contains("conversion")) {
    check_keys(j["conversion"], "conversion", {"wavelength_nm", "coupling_fraction"});
    read(j["conversion"], "wavelength_nm", c.conversion.wavelength_nm);
    read(j["conversion"], "coupling_fraction", c.conversion.coupling_fraction);
  }
  if (j.contains("grids")) {
    check_keys(j["grids"], "grids", {"detuning", "flux", "tau"});
    read(j["grids"], "detuning", c.grids.detuning);
    read(j["grids"], "flux", c.grids.flux);
    read(j["grids"], "tau", c.grids.tau);
  }
  validate(c);
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["emitter"] = {{"gamma_rad", c.emitter.gamma_rad}, {"beta", c.emitter.beta}, {"gamma_deph", c.emitter.gamma_deph}};
  j["noise"] = {{"sigma", c.noise.sigma}, {"alpha", c.noise.alpha}};
  j["cavity"] = {{"r_left", c.cavity.r_left},
                 {"r_right", c.cavity.r_right},
                 {"phi_left", c.cavity.phi_left},
                 {"phi_right", c.cavity.phi_right},
                 {"phase_dispersion", c.cavity.phase_dispersion}};
  j["detector"] = {{"jitter_sigma", c.detector.jitter_sigma}};
  j["conversion"] = {{"wavelength_nm", c.conversion.wavelength_nm},
                     {"coupling_fraction", c.conversion.coupling_fraction}};
  j["grids"] = {{"detuning", grid_json(c.grids.detuning)},
                {"flux", grid_json(c.grids.flux)},
                {"tau", grid_json(c.grids.tau)}};
  return j;
}

void validate(const RunConfig& c) {
  wqed::validate(c.emitter);
  wqed::validate(c.noise);
  wqed::validate(c.cavity);
  wqed::validate(c.detector);
  wqed::validate(c.conversion);
  const auto check = [](const LinearGrid& g, const char* name) {
    if (g.count < 2) fail(ErrorCode::OutOfRange, std::string(name) + " grid count must be >= 2");
    if (!(g.max > g.min)) fail(ErrorCode::OutOfRange, std::string(name) + " grid needs max > min");
  };
  check(c.grids.detuning, "detuning");
  check(c.grids.flux, "flux");
  check(c.grids.tau, "tau");
  if (!(c.grids.flux.min > 0.0)) fail(ErrorCode::OutOfRange, "flux grid min must be > 0");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::OutOfRange, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace wqed::cli
