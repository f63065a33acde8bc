#pragma once

// Two-photon component of the transmitted light for a weak monochromatic
// coherent input. The transmitted two-photon amplitude in the relative
// coordinate x = t2 - t1 (ns) is
//
//   psi(x) = t(delta)^2 + B exp((i delta Gamma - gamma_tot) |x|),
//
// an uncorrelated plane-wave product plus an exponentially bound part.
// Non-guided decay and pure dephasing sit in the emitter pole. psi(0) keeps
// the phase of the dephasing-free amplitude t^2 - r^2 and its modulus is set
// so |psi(0)|^2 equals the master-equation coincidence rate G2(0)/|alpha_in|^4.
// Without dephasing this gives B = -r^2 exactly.

#include <complex>

#include "wqed/ensemble.hpp"
#include "wqed/params.hpp"

namespace wqed {

struct TwoPhotonOutput {
  std::complex<double> product;   // t(delta)^2, constant in x
  std::complex<double> bound;     // B, value of the bound part at x = 0
  double decay_rate = 0.0;        // gamma_tot, ns^-1
  double oscillation = 0.0;       // delta Gamma, ns^-1
  double single_transmission = 0.0;  // weak-drive T_total, incl. incoherent

  std::complex<double> product_amplitude() const { return product; }
  std::complex<double> bound_amplitude(double x) const;
  std::complex<double> amplitude(double x) const { return product + bound_amplitude(x); }
  /// |psi(x)|^2: two-photon coincidence rate normalised to |alpha_in|^4.
  double coincidence(double x) const { return std::norm(amplitude(x)); }
  /// Normalised zero-delay correlation |psi(0)|^2 / T^2.
  double g2_zero() const;
};

TwoPhotonOutput two_photon_transmitted(const EmitterParams& emitter, double detuning);

/// Share of the zero-delay two-photon transmission not carried by the
/// uncorrelated product: 1 - |t|^4 / |psi(0)|^2, clipped to [0, 1].
double bound_state_fraction(const EmitterParams& emitter, double detuning);

/// Quasi-static noise average: 1 - E[|t|^4] / E[|psi(0)|^2] with the dark
/// state transmitting uncorrelated light.
double noisy_bound_state_fraction(const EmitterParams& emitter, double detuning,
                                  const EnsembleSpec& spec);

}  // namespace wqed
