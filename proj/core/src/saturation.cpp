#include <cmath>

#include "wqed/dynamics.hpp"
#include "wqed/ensemble.hpp"
#include "wqed/error.hpp"

namespace wqed {

double saturation_contrast(const EmitterParams& emitter, const NoiseModel& noise, double flux) {
  validate(emitter);
  validate(noise);
  if (!(flux >= 0.0)) fail(ErrorCode::OutOfRange, "flux must be >= 0");
  if (noise.is_deconvolved()) {
    if (flux == 0.0) return 1.0 - weak_drive_limit(emitter, 0.0).transmission;
    return 1.0 - transmission_closed_form(emitter, {0.0, flux}).total;
  }
  EnsembleSpec spec;
  spec.noise = noise;
  if (flux == 0.0) return 1.0 - noisy_weak_transmission(emitter, 0.0, spec).value;
  return 1.0 - noisy_transmission(emitter, {0.0, flux}, spec).value;
}

double critical_flux(const EmitterParams& emitter, const NoiseModel& noise) {
  validate(emitter);
  validate(noise);
  const double c0 = saturation_contrast(emitter, noise, 0.0);
  if (emitter.beta == 0.0 || !(c0 >= 1e-9))
    fail(ErrorCode::NoContrast, "weak-drive resonant contrast vanishes");
  const double half = 0.5 * c0;
  const auto excess = [&](double log_n) {
    return saturation_contrast(emitter, noise, std::exp(log_n)) - half;
  };

  double lo = std::log(1e-8);
  double hi = std::log(1e6);
  if (excess(lo) <= 0.0)
    fail(ErrorCode::BracketingFailure, "contrast already below half at the smallest flux");
  if (excess(hi) > 0.0)
    fail(ErrorCode::BracketingFailure, "no half-contrast crossing up to n = 1e6");
  // Interval in log n shrinks until the flux is pinned to 1e-6 relative.
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace wqed
