#include "wqed/scattering.hpp"

#include <cmath>

#include "wqed/error.hpp"

namespace wqed {

ScatterAmplitudes emitter_amplitudes(const EmitterParams& emitter, double detuning) {
  const double g = emitter.gamma_rad;
  const cplx pole(emitter.coherence_rate(), -detuning * g);
  const cplx r = -emitter.directional_rate() / pole;
  return {1.0 + r, r};
}

TwoPort TwoPort::mirror(double reflectivity) {
  // r real, t imaginary keeps the 2x2 S-matrix unitary.
  const cplx t(0.0, std::sqrt(1.0 - reflectivity * reflectivity));
  return {t, reflectivity, reflectivity};
}

TwoPort TwoPort::propagation(double phase) {
  return {std::polar(1.0, phase), 0.0, 0.0};
}

TwoPort cascade(const TwoPort& a, const TwoPort& b) {
  const cplx denom = 1.0 - a.r_back * b.r;
  if (std::abs(denom) < 1e-14)
    fail(ErrorCode::SingularComposition, "multiple-reflection series diverges (|r| -> 1)");
  const cplx inv = 1.0 / denom;
  TwoPort out;
  out.t = a.t * b.t * inv;
  out.r = a.r + a.t * a.t * b.r * inv;
  out.r_back = b.r_back + b.t * b.t * a.r_back * inv;
  return out;
}

TwoPort composite(const EmitterParams& emitter, const CavityBackground& cavity, double detuning,
                  double emitter_shift) {
  const auto amp = emitter_amplitudes(emitter, detuning - emitter_shift);
  const double phase_l = 0.5 * (cavity.phi_left + cavity.phase_dispersion * detuning);
  const double phase_r = 0.5 * (cavity.phi_right + cavity.phase_dispersion * detuning);
  TwoPort stack = TwoPort::mirror(cavity.r_left);
  stack = cascade(stack, TwoPort::propagation(phase_l));
  stack = cascade(stack, TwoPort::symmetric(amp.t, amp.r));
  stack = cascade(stack, TwoPort::propagation(phase_r));
  return cascade(stack, TwoPort::mirror(cavity.r_right));
}

std::vector<double> fano_spectrum(const EmitterParams& emitter, const CavityBackground& cavity,
                                  std::span<const double> detunings) {
  validate(emitter);
  validate(cavity);
  std::vector<double> out;
  out.reserve(detunings.size());
  for (double d : detunings) {
    if (!std::isfinite(d)) fail(ErrorCode::NonFinite, "detuning grid entry is not finite");
    if (cavity.is_bare()) {
      out.push_back(std::norm(emitter_amplitudes(emitter, d).t));
    } else {
      out.push_back(std::norm(composite(emitter, cavity, d).t));
    }
  }
  return out;
}

double background_transmission(const CavityBackground& cavity, double detuning) {
  EmitterParams dark;
  dark.beta = 0.0;
  return std::norm(composite(dark, cavity, detuning).t);
}

}  // namespace wqed
