#include "wqed/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wqed/dynamics.hpp"
#include "wqed/error.hpp"
#include "wqed/scattering.hpp"

namespace wqed {
namespace {

double max_relative_change(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(b[i]), 1e-300);
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

GaussRule delta_rule() { return {{0.0}, {1.0}}; }

// Evaluates `eval(rule)` on the doubling sequence of orders until successive
// results agree. Spectral diffusion off collapses to the single node 0.
template <typename Eval>
std::pair<std::vector<double>, std::size_t> converge(const EnsembleSpec& spec, Eval&& eval) {
  validate(spec);
  if (spec.noise.sigma == 0.0) return {eval(delta_rule()), 1};

  std::size_t order = spec.quadrature_order;
  std::vector<double> prev = eval(*gauss_hermite(order));
  double change = 0.0;
  while (2 * order - 1 <= spec.max_order) {
    const std::size_t next = 2 * order - 1;
    std::vector<double> cur = eval(*gauss_hermite(next));
    change = max_relative_change(prev, cur);
    prev = std::move(cur);
    order = next;
    if (change <= spec.tolerance) return {std::move(prev), order};
  }
  std::ostringstream os;
  os << "relative change " << change << " at order " << order << " exceeds " << spec.tolerance;
  fail(ErrorCode::QuadratureNotConverged, os.str());
}

}  // namespace

const EnsembleSpec& validate(const EnsembleSpec& spec) {
  validate(spec.noise);
  if (spec.quadrature_order < 1 || spec.quadrature_order % 2 == 0)
    fail(ErrorCode::OutOfRange, "quadrature_order must be odd and >= 1");
  if (spec.max_order < spec.quadrature_order)
    fail(ErrorCode::OutOfRange, "max_order must be >= quadrature_order");
  if (!(spec.tolerance > 0.0)) fail(ErrorCode::OutOfRange, "tolerance must be > 0");
  return spec;
}

double average_spectrum_fixed(const SpectralFunction& bright, double dark, const NoiseModel& noise,
                              const GaussRule& rule, double laser_detuning) {
  if (noise.alpha >= 1.0) return dark;
  double acc = 0.0;
  if (noise.sigma == 0.0) {
    acc = bright(laser_detuning);
  } else {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (rule.weights[i] == 0.0) continue;
      acc += rule.weights[i] * bright(laser_detuning - noise.sigma * rule.nodes[i]);
    }
  }
  return noise.alpha * dark + (1.0 - noise.alpha) * acc;
}

EnsembleValue average_spectrum(const SpectralFunction& bright, double dark,
                               const EnsembleSpec& spec, double laser_detuning) {
  if (!std::isfinite(laser_detuning)) fail(ErrorCode::NonFinite, "laser detuning is not finite");
  if (spec.noise.alpha >= 1.0) {
    validate(spec);
    return {dark, 0};
  }
  auto [v, order] = converge(spec, [&](const GaussRule& rule) {
    return std::vector<double>{average_spectrum_fixed(bright, dark, spec.noise, rule, laser_detuning)};
  });
  return {v[0], order};
}

std::size_t converged_order(const SpectralFunction& bright, const EnsembleSpec& spec,
                            double laser_detuning) {
  return average_spectrum(bright, 0.0, spec, laser_detuning).order;
}

CorrelationTrace average_g2(std::span<const G2Component> components) {
  if (components.empty()) fail(ErrorCode::OutOfRange, "no components to average");
  const auto& grid = components.front().trace.tau;
  double wsum = 0.0;
  for (const auto& c : components) {
    if (c.trace.tau != grid) fail(ErrorCode::GridMismatch, "components use different tau grids");
    if (c.trace.values.size() != grid.size())
      fail(ErrorCode::GridMismatch, "trace values and tau grid differ in length");
    if (!(c.weight >= 0.0)) fail(ErrorCode::OutOfRange, "component weight must be >= 0");
    if (!(c.intensity >= 0.0)) fail(ErrorCode::OutOfRange, "component intensity must be >= 0");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) fail(ErrorCode::OutOfRange, "component weights must sum to 1");

  CorrelationTrace out;
  out.tau = grid;
  out.flux_per_lifetime = components.front().trace.flux_per_lifetime;
  out.values.assign(grid.size(), 0.0);
  double mean = 0.0;
  for (const auto& c : components) {
    mean += c.weight * c.intensity;
    const double w2 = c.weight * c.intensity * c.intensity;
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] += w2 * c.trace.values[i];
  }
  if (!(mean > 0.0)) fail(ErrorCode::NoTransmission, "mixture carries no intensity");
  for (double& v : out.values) v /= mean * mean;
  return out;
}

CorrelationTrace detector_convolve(const CorrelationTrace& trace, const DetectorModel& det) {
  validate(det);
  validate(trace);
  if (det.jitter_sigma == 0.0) return trace;
  const auto& tau = trace.tau;
  if (tau.size() < 2) fail(ErrorCode::GridTooCoarse, "trace needs at least two samples");
  const double dt = (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (std::abs((tau[i] - tau[i - 1]) - dt) > 1e-6 * dt)
      fail(ErrorCode::GridTooCoarse, "detector convolution needs a uniform tau grid");
  }
  if (dt > det.jitter_sigma / 4.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "tau spacing " << dt << " ns exceeds jitter_sigma/4 = " << det.jitter_sigma / 4.0;
    fail(ErrorCode::GridTooCoarse, os.str());
  }

  // Difference of two independent detector delays.
  const double width = std::sqrt(2.0) * det.jitter_sigma;
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(8.0 * width / dt));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double ksum = 0.0;
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double x = static_cast<double>(j) * dt / width;
    kernel[static_cast<std::size_t>(j + half)] = std::exp(-0.5 * x * x);
    ksum += kernel[static_cast<std::size_t>(j + half)];
  }
  for (double& k : kernel) k /= ksum;

  const auto n = static_cast<std::ptrdiff_t>(tau.size());
  CorrelationTrace out = trace;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
      const std::ptrdiff_t src = i - j;
      if (src < 0 || src >= n) continue;
      acc += kernel[static_cast<std::size_t>(j + half)] *
             (trace.values[static_cast<std::size_t>(src)] - 1.0);
    }
    out.values[static_cast<std::size_t>(i)] = 1.0 + acc;
  }
  return out;
}

double calibrate_jitter(const CorrelationTrace& trace, double target_peak) {
  validate(trace);
  const auto peak_of = [](const CorrelationTrace& t) {
    return *std::max_element(t.values.begin(), t.values.end());
  };
  const double raw = peak_of(trace);
  if (!(target_peak < raw && target_peak > 1.0))
    fail(ErrorCode::OutOfRange, "target peak must lie between 1 and the unconvolved peak");
  const double dt = (trace.tau.back() - trace.tau.front()) / static_cast<double>(trace.tau.size() - 1);
  double lo = 4.0 * dt;
  if (peak_of(detector_convolve(trace, {lo})) <= target_peak)
    fail(ErrorCode::GridTooCoarse, "grid too coarse to resolve the calibrated jitter");
  double hi = 2.0 * lo;
  while (peak_of(detector_convolve(trace, {hi})) > target_peak) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0.25 * (trace.tau.back() - trace.tau.front()))
      fail(ErrorCode::BracketingFailure, "no jitter within the trace span reaches the target peak");
  }
  for (int it = 0; it < 100 && (hi - lo) > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (peak_of(detector_convolve(trace, {mid})) > target_peak) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EnsembleValue noisy_transmission(const EmitterParams& emitter, const DriveSpec& drive,
                                 const EnsembleSpec& spec) {
  validate(emitter);
  validate(drive);
  const auto bright = [&](double d) {
    return transmission_closed_form(emitter, {d, drive.flux_per_lifetime}).total;
  };
  return average_spectrum(bright, 1.0, spec, drive.detuning);
}

EnsembleValue noisy_weak_transmission(const EmitterParams& emitter, double laser_detuning,
                                      const EnsembleSpec& spec) {
  validate(emitter);
  const auto bright = [&](double d) { return weak_drive_limit(emitter, d).transmission; };
  return average_spectrum(bright, 1.0, spec, laser_detuning);
}

std::vector<double> noisy_fano_spectrum(const EmitterParams& emitter,
                                        const CavityBackground& cavity,
                                        std::span<const double> laser_detunings,
                                        const EnsembleSpec& spec) {
  validate(emitter);
  validate(cavity);
  std::vector<double> out;
  out.reserve(laser_detunings.size());
  for (double laser : laser_detunings) {
    const auto bright = [&](double emitter_detuning) {
      return std::norm(composite(emitter, cavity, laser, laser - emitter_detuning).t);
    };
    out.push_back(average_spectrum(bright, background_transmission(cavity, laser), spec, laser).value);
  }
  return out;
}

NoisyTrace noisy_g2_trace(const EmitterParams& emitter, const DriveSpec& drive,
                          std::span<const double> tau, const EnsembleSpec& spec) {
  validate(emitter);
  validate(drive);
  if (!(drive.flux_per_lifetime > 0.0)) fail(ErrorCode::DivisionByZeroFlux, "g2 undefined at zero flux");
  const double alpha = spec.noise.alpha;
  double mean_intensity = 0.0;

  // Result layout: [g2 values..., mean intensity].
  auto eval = [&](const GaussRule& rule) {
    std::vector<double> num(tau.size(), 0.0);
    double mean = alpha;  // dark: T = 1, g2 = 1
    for (double& v : num) v = alpha;
    if (alpha < 1.0) {
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double w = (1.0 - alpha) * rule.weights[k];
        if (w == 0.0) continue;
        const DriveSpec node{drive.detuning - spec.noise.sigma * rule.nodes[k], drive.flux_per_lifetime};
        const LindbladModel model = build_model(emitter, node);
        const double intensity = transmission(model, steady_state(model)).total;
        const auto g2 = g2_values(model, tau);
        mean += w * intensity;
        for (std::size_t i = 0; i < tau.size(); ++i) num[i] += w * intensity * intensity * g2[i];
      }
    }
    for (double& v : num) v /= mean * mean;
    num.push_back(mean);
    return num;
  };

  NoisyTrace out;
  if (alpha >= 1.0) {
    validate(spec);
    auto v = eval(delta_rule());
    mean_intensity = v.back();
    v.pop_back();
    out.trace = {{tau.begin(), tau.end()}, std::move(v), drive.flux_per_lifetime};
    out.mean_intensity = mean_intensity;
    return out;
  }
  auto [v, order] = converge(spec, eval);
  out.mean_intensity = v.back();
  v.pop_back();
  out.trace = {{tau.begin(), tau.end()}, std::move(v), drive.flux_per_lifetime};
  out.order = order;
  return out;
}

EnsembleValue noisy_weak_g2_zero(const EmitterParams& emitter, double laser_detuning,
                                 const EnsembleSpec& spec) {
  validate(emitter);
  const double alpha = spec.noise.alpha;
  auto eval = [&](const GaussRule& rule) {
    double mean = alpha;
    double coinc = alpha;
    if (alpha < 1.0) {
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double w = (1.0 - alpha) * rule.weights[k];
        if (w == 0.0) continue;
        const auto lim = weak_drive_limit(emitter, laser_detuning - spec.noise.sigma * rule.nodes[k]);
        mean += w * lim.transmission;
        coinc += w * lim.coincidence;
      }
    }
    return std::vector<double>{coinc / (mean * mean)};
  };
  if (alpha >= 1.0) return {1.0, 0};
  auto [v, order] = converge(spec, eval);
  return {v[0], order};
}

}  // namespace wqed
