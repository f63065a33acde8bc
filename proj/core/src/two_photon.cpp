#include "wqed/two_photon.hpp"

#include <algorithm>
#include <cmath>

#include "wqed/dynamics.hpp"
#include "wqed/error.hpp"
#include "wqed/scattering.hpp"

namespace wqed {

using cplx = std::complex<double>;

cplx TwoPhotonOutput::bound_amplitude(double x) const {
  return bound * std::exp(cplx(-decay_rate, oscillation) * std::abs(x));
}

double TwoPhotonOutput::g2_zero() const {
  return coincidence(0.0) / (single_transmission * single_transmission);
}

TwoPhotonOutput two_photon_transmitted(const EmitterParams& emitter, double detuning) {
  validate(emitter);
  if (!std::isfinite(detuning)) fail(ErrorCode::NonFinite, "detuning is not finite");
  const auto amp = emitter_amplitudes(emitter, detuning);
  const auto lim = weak_drive_limit(emitter, detuning);

  TwoPhotonOutput out;
  out.product = amp.t * amp.t;
  out.decay_rate = emitter.coherence_rate();
  out.oscillation = detuning * emitter.gamma_rad;
  out.single_transmission = lim.transmission;

  const cplx coherent = amp.t * amp.t - amp.r * amp.r;
  const double modulus = std::sqrt(std::max(lim.coincidence, 0.0));
  const cplx phase = std::abs(coherent) > 1e-300 ? coherent / std::abs(coherent) : cplx(1.0, 0.0);
  out.bound = modulus * phase - out.product;
  if (emitter.beta == 0.0) out.bound = 0.0;
  return out;
}

double bound_state_fraction(const EmitterParams& emitter, double detuning) {
  const TwoPhotonOutput tp = two_photon_transmitted(emitter, detuning);
  const double total = tp.coincidence(0.0);
  if (total < 1e-15) {
    if (std::abs(tp.bound) > 0.0) return 1.0;
    fail(ErrorCode::NoTransmission, "no two-photon transmission and no bound part");
  }
  return std::clamp(1.0 - std::norm(tp.product) / total, 0.0, 1.0);
}

double noisy_bound_state_fraction(const EmitterParams& emitter, double detuning,
                                  const EnsembleSpec& spec) {
  validate(emitter);
  const auto product = [&](double d) { return std::norm(emitter_amplitudes(emitter, d).t) *
                                              std::norm(emitter_amplitudes(emitter, d).t); };
  const auto coinc = [&](double d) { return weak_drive_limit(emitter, d).coincidence; };
  const double p = average_spectrum(product, 1.0, spec, detuning).value;
  const double c = average_spectrum(coinc, 1.0, spec, detuning).value;
  if (c < 1e-15) fail(ErrorCode::NoTransmission, "no two-photon transmission");
  return std::clamp(1.0 - p / c, 0.0, 1.0);
}

}  // namespace wqed
