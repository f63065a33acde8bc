#pragma once

// Quasi-static noise ensemble: Gaussian spectral diffusion of the emitter line
// and binary blinking into a dark (non-interacting) state. Also the detector
// timing response applied to correlation traces.
//
// "Deconvolution" throughout is model re-evaluation with NoiseModel{0, 0} and
// DetectorModel{0}; no inverse filtering of data is attempted.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wqed/params.hpp"
#include "wqed/quadrature.hpp"

namespace wqed {

struct EnsembleSpec {
  NoiseModel noise;
  std::size_t quadrature_order = 41;  // must be odd so delta = 0 is a node
  std::size_t max_order = 2561;       // refinement ceiling, (order - 1) doubles
  double tolerance = 1e-6;            // relative change on doubling
};

const EnsembleSpec& validate(const EnsembleSpec& spec);

/// Value plus the quadrature order at which it converged.
struct EnsembleValue {
  double value = 0.0;
  std::size_t order = 0;
};

/// Function of the laser-emitter detuning (units of Gamma).
using SpectralFunction = std::function<double(double)>;

/// alpha * dark + (1 - alpha) * E[f(laser - Delta)], Delta ~ N(0, sigma).
/// The order starts at spec.quadrature_order and doubles until two successive
/// results agree to spec.tolerance; QuadratureNotConverged past max_order.
EnsembleValue average_spectrum(const SpectralFunction& bright, double dark,
                               const EnsembleSpec& spec, double laser_detuning);

/// Single fixed-order evaluation, no convergence guard.
double average_spectrum_fixed(const SpectralFunction& bright, double dark, const NoiseModel& noise,
                              const GaussRule& rule, double laser_detuning);

/// Smallest order in the doubling sequence at which `bright` converges.
std::size_t converged_order(const SpectralFunction& bright, const EnsembleSpec& spec,
                            double laser_detuning);

struct G2Component {
  double weight = 0.0;
  double intensity = 0.0;
  CorrelationTrace trace;
};

/// Static mixture: sum w I^2 g2 / (sum w I)^2.
CorrelationTrace average_g2(std::span<const G2Component> components);

/// Convolves (g2 - 1) with a Gaussian of std sqrt(2) * jitter_sigma.
CorrelationTrace detector_convolve(const CorrelationTrace& trace, const DetectorModel& det);

/// Jitter (ns) that maps the trace's peak to `target_peak`, by bisection.
double calibrate_jitter(const CorrelationTrace& trace, double target_peak);

/// Noise-averaged forward transmission on the laser detuning given in `drive`.
/// The dark state transmits with T = 1 (no background).
EnsembleValue noisy_transmission(const EmitterParams& emitter, const DriveSpec& drive,
                                 const EnsembleSpec& spec);

/// Weak-drive limit of the noise-averaged transmission.
EnsembleValue noisy_weak_transmission(const EmitterParams& emitter, double laser_detuning,
                                      const EnsembleSpec& spec);

/// Noise-averaged Fano spectrum, dark state = bare background.
std::vector<double> noisy_fano_spectrum(const EmitterParams& emitter,
                                        const CavityBackground& cavity,
                                        std::span<const double> laser_detunings,
                                        const EnsembleSpec& spec);

struct NoisyTrace {
  CorrelationTrace trace;
  double mean_intensity = 0.0;  // noise-averaged T_total
  std::size_t order = 0;
};

/// Noise-averaged g2(tau) of the transmitted light; converges on the whole
/// trace (max relative change).
NoisyTrace noisy_g2_trace(const EmitterParams& emitter, const DriveSpec& drive,
                          std::span<const double> tau, const EnsembleSpec& spec);

/// Noise-averaged weak-drive g2(0), using the closed-form coincidence rate.
EnsembleValue noisy_weak_g2_zero(const EmitterParams& emitter, double laser_detuning,
                                 const EnsembleSpec& spec);

}  // namespace wqed
