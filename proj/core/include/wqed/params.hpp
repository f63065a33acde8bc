#pragma once

// Physical parameter types shared by every module.
//
// Unit conventions: rates (gamma_rad, gamma_deph) are in ns^-1. Detunings and
// the spectral-diffusion width are dimensionless, in units of gamma_rad.
// Photon flux is carried as photons per emitter lifetime, n = Phi / Gamma.

#include <vector>

namespace wqed {

/// Coherent two-level emitter coupled to a bidirectional waveguide.
struct EmitterParams {
  double gamma_rad = 2.5;    // total spontaneous decay rate, ns^-1
  double beta = 0.85;        // fraction of gamma_rad into the guided mode
  double gamma_deph = 1.975; // pure dephasing rate, ns^-1

  /// Decay rate of the optical coherence, gamma_rad/2 + gamma_deph.
  double coherence_rate() const noexcept { return 0.5 * gamma_rad + gamma_deph; }
  /// Emission rate into one waveguide direction, beta * gamma_rad / 2.
  double directional_rate() const noexcept { return 0.5 * beta * gamma_rad; }
};

/// Slow classical noise: Gaussian spectral diffusion plus binary blinking.
struct NoiseModel {
  double sigma = 0.0;  // std. dev. of the emitter detuning, units of gamma_rad
  double alpha = 0.0;  // probability of the dark state

  bool is_deconvolved() const noexcept { return sigma == 0.0 && alpha == 0.0; }
};

/// Residual reflections at the waveguide terminations (weak Fabry-Perot).
struct CavityBackground {
  double r_left = 0.0;
  double r_right = 0.0;
  double phi_left = 0.0;          // round-trip phase, mirror <-> emitter, rad
  double phi_right = 0.0;
  double phase_dispersion = 0.0;  // d(round-trip phase)/d(detuning), rad per gamma_rad

  bool is_bare() const noexcept { return r_left == 0.0 && r_right == 0.0; }
};

struct DriveSpec {
  double detuning = 0.0;           // laser - emitter, units of gamma_rad
  double flux_per_lifetime = 0.0;  // n = Phi / Gamma
};

struct DetectorModel {
  double jitter_sigma = 0.0;  // single-detector Gaussian jitter, ns
};

/// g2 sampled on a delay grid (ns).
struct CorrelationTrace {
  std::vector<double> tau;
  std::vector<double> values;
  double flux_per_lifetime = 0.0;
};

/// Wavelength and input coupling used to map applied power to flux.
struct PowerConversion {
  double wavelength_nm = 940.0;
  double coupling_fraction = 0.23;
};

const EmitterParams& validate(const EmitterParams& p);
const NoiseModel& validate(const NoiseModel& p);
const CavityBackground& validate(const CavityBackground& p);
const DriveSpec& validate(const DriveSpec& p);
const DetectorModel& validate(const DetectorModel& p);
const CorrelationTrace& validate(const CorrelationTrace& p);
const PowerConversion& validate(const PowerConversion& p);

namespace units {

inline constexpr double kPlanck = 6.62607015e-34;        // J s
inline constexpr double kSpeedOfLight = 299792458.0;     // m / s
inline constexpr double kAttojoule = 1e-18;

/// Photon energy in joules.
double photon_energy(double wavelength_nm);

double photons_per_second(double flux_per_lifetime, double gamma_rad);
double flux_per_lifetime(double photons_per_second, double gamma_rad);

/// Applied power (nW) -> photons per lifetime at the emitter.
double power_to_flux(double power_nw, double gamma_rad, const PowerConversion& conv);
double flux_to_power(double flux_per_lifetime, double gamma_rad, const PowerConversion& conv);

/// Energy delivered in one emitter lifetime at flux n, in attojoule.
double switching_energy_aj(double flux_per_lifetime, double wavelength_nm);

}  // namespace units
}  // namespace wqed
