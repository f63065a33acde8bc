#include "wqed/params.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "wqed/error.hpp"

namespace wqed {
namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) fail(ErrorCode::NonFinite, std::string(field) + " is not finite");
}

void require(bool ok, const char* field, const char* bound, double v) {
  if (ok) return;
  std::ostringstream os;
  os << field << " = " << v << " violates " << bound;
  fail(ErrorCode::OutOfRange, os.str());
}

}  // namespace

const EmitterParams& validate(const EmitterParams& p) {
  require_finite(p.gamma_rad, "gamma_rad");
  require_finite(p.beta, "beta");
  require_finite(p.gamma_deph, "gamma_deph");
  require(p.gamma_rad > 0.0, "gamma_rad", "gamma_rad > 0", p.gamma_rad);
  require(p.beta >= 0.0 && p.beta <= 1.0, "beta", "0 <= beta <= 1", p.beta);
  require(p.gamma_deph >= 0.0, "gamma_deph", "gamma_deph >= 0", p.gamma_deph);
  require(p.coherence_rate() > 0.0, "coherence_rate", "gamma_rad/2 + gamma_deph > 0",
          p.coherence_rate());
  return p;
}

const NoiseModel& validate(const NoiseModel& p) {
  require_finite(p.sigma, "sigma");
  require_finite(p.alpha, "alpha");
  require(p.sigma >= 0.0, "sigma", "sigma >= 0", p.sigma);
  require(p.alpha >= 0.0 && p.alpha <= 1.0, "alpha", "0 <= alpha <= 1", p.alpha);
  return p;
}

const CavityBackground& validate(const CavityBackground& p) {
  require_finite(p.r_left, "r_left");
  require_finite(p.r_right, "r_right");
  require_finite(p.phi_left, "phi_left");
  require_finite(p.phi_right, "phi_right");
  require_finite(p.phase_dispersion, "phase_dispersion");
  require(p.r_left >= 0.0 && p.r_left < 1.0, "r_left", "0 <= r_left < 1", p.r_left);
  require(p.r_right >= 0.0 && p.r_right < 1.0, "r_right", "0 <= r_right < 1", p.r_right);
  return p;
}

const DriveSpec& validate(const DriveSpec& p) {
  require_finite(p.detuning, "detuning");
  require_finite(p.flux_per_lifetime, "flux_per_lifetime");
  require(p.flux_per_lifetime >= 0.0, "flux_per_lifetime", "flux_per_lifetime >= 0",
          p.flux_per_lifetime);
  return p;
}

const DetectorModel& validate(const DetectorModel& p) {
  require_finite(p.jitter_sigma, "jitter_sigma");
  require(p.jitter_sigma >= 0.0, "jitter_sigma", "jitter_sigma >= 0", p.jitter_sigma);
  return p;
}

const CorrelationTrace& validate(const CorrelationTrace& p) {
  if (p.tau.size() != p.values.size())
    fail(ErrorCode::GridMismatch, "tau and values differ in length");
  for (std::size_t i = 0; i < p.tau.size(); ++i) {
    require_finite(p.tau[i], "tau");
    require_finite(p.values[i], "values");
    require(p.values[i] >= 0.0, "values", "g2 >= 0", p.values[i]);
    if (i > 0) require(p.tau[i] > p.tau[i - 1], "tau", "strictly increasing", p.tau[i]);
  }
  return p;
}

const PowerConversion& validate(const PowerConversion& p) {
  require_finite(p.wavelength_nm, "wavelength_nm");
  require_finite(p.coupling_fraction, "coupling_fraction");
  require(p.wavelength_nm > 0.0, "wavelength_nm", "wavelength_nm > 0", p.wavelength_nm);
  require(p.coupling_fraction > 0.0 && p.coupling_fraction <= 1.0, "coupling_fraction",
          "0 < coupling_fraction <= 1", p.coupling_fraction);
  return p;
}

namespace units {

double photon_energy(double wavelength_nm) {
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

double photons_per_second(double flux_per_lifetime, double gamma_rad) {
  return flux_per_lifetime * gamma_rad * 1e9;
}

double flux_per_lifetime(double photons_per_second, double gamma_rad) {
  return photons_per_second / (gamma_rad * 1e9);
}

double power_to_flux(double power_nw, double gamma_rad, const PowerConversion& conv) {
  const double rate = power_nw * 1e-9 * conv.coupling_fraction / photon_energy(conv.wavelength_nm);
  return flux_per_lifetime(rate, gamma_rad);
}

double flux_to_power(double flux_per_lifetime, double gamma_rad, const PowerConversion& conv) {
  const double rate = photons_per_second(flux_per_lifetime, gamma_rad);
  return rate * photon_energy(conv.wavelength_nm) / conv.coupling_fraction * 1e9;
}

double switching_energy_aj(double flux_per_lifetime, double wavelength_nm) {
  return flux_per_lifetime * photon_energy(wavelength_nm) / kAttojoule;
}

}  // namespace units
}  // namespace wqed
