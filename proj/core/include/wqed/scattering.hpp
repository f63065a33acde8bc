#pragma once

// Single-photon (linear response) scattering off the emitter, and the
// composite Fano spectrum when the emitter sits inside the weak Fabry-Perot
// formed by the waveguide terminations.

#include <complex>
#include <span>
#include <vector>

#include "wqed/params.hpp"

namespace wqed {

using cplx = std::complex<double>;

struct ScatterAmplitudes {
  cplx t;  // forward
  cplx r;  // backward
};

/// t = 1 - (beta Gamma/2) / (Gamma/2 + gamma_deph - i delta Gamma), r = t - 1.
ScatterAmplitudes emitter_amplitudes(const EmitterParams& emitter, double detuning);

/// Reciprocal two-port in scattering form. `r` is seen from the left,
/// `r_back` from the right.
struct TwoPort {
  cplx t = 1.0;
  cplx r = 0.0;
  cplx r_back = 0.0;

  static TwoPort symmetric(cplx t, cplx r) { return {t, r, r}; }
  /// Lossless mirror with real amplitude reflectivity.
  static TwoPort mirror(double reflectivity);
  /// Free propagation with one-way phase.
  static TwoPort propagation(double phase);
};

/// Cascade `left` followed by `right` (Redheffer star product).
TwoPort cascade(const TwoPort& left, const TwoPort& right);

/// Full mirror / emitter / mirror stack at one laser detuning. The emitter
/// line can be displaced by `emitter_shift` (spectral diffusion) while the
/// background phases follow the laser.
TwoPort composite(const EmitterParams& emitter, const CavityBackground& cavity, double detuning,
                  double emitter_shift = 0.0);

/// |t_total(delta)|^2 on the grid.
std::vector<double> fano_spectrum(const EmitterParams& emitter, const CavityBackground& cavity,
                                  std::span<const double> detunings);

/// Transmission of the background alone (emitter decoupled) at one detuning.
double background_transmission(const CavityBackground& cavity, double detuning);

}  // namespace wqed
