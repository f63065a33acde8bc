#include "wqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "wqed/error.hpp"

namespace wqed {

using cplx = std::complex<double>;
constexpr cplx kI(0.0, 1.0);

namespace ops {
Matrix2c sigma_minus() {
  Matrix2c m = Matrix2c::Zero();
  m(1, 0) = 1.0;
  return m;
}
Matrix2c sigma_plus() { return sigma_minus().adjoint(); }
Matrix2c sigma_z() {
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}
Matrix2c identity() { return Matrix2c::Identity(); }
}  // namespace ops

Matrix2c LindbladModel::output_operator() const {
  return input_amplitude * ops::identity() - kI * output_coupling * ops::sigma_minus();
}

LindbladModel build_model(const EmitterParams& emitter, const DriveSpec& drive) {
  validate(emitter);
  validate(drive);
  const double g = emitter.gamma_rad;
  const double flux = drive.flux_per_lifetime * g;

  LindbladModel m;
  m.emitter = emitter;
  m.drive = drive;
  m.drive_rabi = std::sqrt(2.0 * emitter.beta * g * flux);
  m.input_amplitude = std::sqrt(flux);
  m.output_coupling = std::sqrt(emitter.directional_rate());
  m.hamiltonian = -drive.detuning * g * ops::sigma_plus() * ops::sigma_minus() +
                  0.5 * m.drive_rabi * (ops::sigma_plus() + ops::sigma_minus());
  m.channels = {
      {emitter.directional_rate(), ops::sigma_minus(), "forward"},
      {emitter.directional_rate(), ops::sigma_minus(), "backward"},
      {(1.0 - emitter.beta) * g, ops::sigma_minus(), "loss"},
      {0.5 * emitter.gamma_deph, ops::sigma_z(), "dephasing"},
  };
  return m;
}

Matrix4c liouvillian(const Matrix2c& h, std::span<const CollapseChannel> channels) {
  const Matrix2c id = Matrix2c::Identity();
  Matrix4c l = -kI * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id));
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    const Matrix2c c = std::sqrt(ch.rate) * ch.op;
    const Matrix2c cdc = c.adjoint() * c;
    l += Eigen::kroneckerProduct(c.conjugate(), c);
    l -= 0.5 * Eigen::kroneckerProduct(id, cdc);
    l -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id);
  }
  return l;
}

Matrix4c liouvillian(const LindbladModel& model) {
  return liouvillian(model.hamiltonian, model.channels);
}

Vector4c vectorize(const Matrix2c& rho) {
  return Eigen::Map<const Vector4c>(rho.data());
}

Matrix2c unvectorize(const Vector4c& v) {
  return Eigen::Map<const Matrix2c>(v.data());
}

namespace {

SteadyState from_rho(const Matrix2c& rho) {
  SteadyState ss;
  ss.rho = rho;
  ss.excited_population = rho(0, 0).real();
  ss.coherence = rho(0, 1);  // tr(sigma_minus rho) = rho_eg
  return ss;
}

}  // namespace

SteadyState steady_state(const LindbladModel& model) {
  const Matrix4c l = liouvillian(model);
  // Replace the first row by the trace functional: rho_ee + rho_gg = 1.
  Matrix4c a = l;
  a.row(0).setZero();
  a(0, 0) = 1.0;
  a(0, 3) = 1.0;
  Vector4c b = Vector4c::Zero();
  b(0) = 1.0;
  const Vector4c x = a.fullPivLu().solve(b);
  Matrix2c rho = unvectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const double residual = (l * vectorize(rho)).norm();
  const double scale = std::max(1.0, l.norm());
  if (!std::isfinite(residual) || residual > 1e-10 * scale) {
    std::ostringstream os;
    os << "steady-state residual " << residual;
    fail(ErrorCode::NumericalFailure, os.str());
  }
  return from_rho(rho);
}

SteadyState bloch_steady_state(const EmitterParams& emitter, const DriveSpec& drive) {
  const double g = emitter.gamma_rad;
  const double g2 = emitter.coherence_rate();
  const double delta = drive.detuning * g;
  const double omega2 = 2.0 * emitter.beta * g * drive.flux_per_lifetime * g;
  const cplx pole(g2, -delta);
  const double pole2 = std::norm(pole);
  const double sat = omega2 * g2 / (g * pole2);
  const double pop = 0.5 * sat / (1.0 + sat);
  const cplx coh = -kI * (0.5 * std::sqrt(omega2)) / (pole * (1.0 + sat));

  Matrix2c rho;
  rho << pop, coh, std::conj(coh), 1.0 - pop;
  return from_rho(rho);
}

Transmission transmission(const LindbladModel& model, const SteadyState& ss) {
  const double flux = model.input_amplitude * model.input_amplitude;
  if (!(flux > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "transmission undefined at zero flux; use emitter_amplitudes");
  const double s = model.output_coupling;
  const cplx mean_out = model.input_amplitude - kI * s * ss.coherence;
  Transmission t;
  t.coherent = std::norm(mean_out) / flux;
  t.incoherent = s * s * (ss.excited_population - std::norm(ss.coherence)) / flux;
  t.total = t.coherent + t.incoherent;
  return t;
}

Transmission transmission(const LindbladModel& model, const DriveSpec& drive) {
  validate(drive);
  if (!(drive.flux_per_lifetime > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "transmission undefined at zero flux; use emitter_amplitudes");
  return transmission(model, steady_state(model));
}

Transmission transmission_closed_form(const EmitterParams& emitter, const DriveSpec& drive) {
  if (!(drive.flux_per_lifetime > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "transmission undefined at zero flux; use emitter_amplitudes");
  const SteadyState ss = bloch_steady_state(emitter, drive);
  const double flux = drive.flux_per_lifetime * emitter.gamma_rad;
  const double amp = std::sqrt(flux);
  const double s = std::sqrt(emitter.directional_rate());
  const cplx mean_out = amp - kI * s * ss.coherence;
  Transmission t;
  t.coherent = std::norm(mean_out) / flux;
  t.incoherent = s * s * (ss.excited_population - std::norm(ss.coherence)) / flux;
  t.total = t.coherent + t.incoherent;
  return t;
}

WeakDriveLimit weak_drive_limit(const EmitterParams& emitter, double detuning) {
  // With s^2 = beta Gamma / 2, pole = gamma_tot - i delta Gamma:
  //   T     = 1 - 2 s^2 gamma_tot/|pole|^2 + 2 s^4 gamma_tot / (Gamma |pole|^2)
  //   G2(0) = 1 - 4 s^2 gamma_tot/|pole|^2 + 8 s^4 gamma_tot / (Gamma |pole|^2)
  const double g = emitter.gamma_rad;
  const double s2 = emitter.directional_rate();
  const double gt = emitter.coherence_rate();
  const double pole2 = gt * gt + detuning * g * detuning * g;
  const double a = s2 * gt / pole2;
  const double b = s2 * s2 * gt / (g * pole2);
  return {1.0 - 2.0 * a + 2.0 * b, 1.0 - 4.0 * a + 8.0 * b};
}

std::vector<double> g2_values(const LindbladModel& model, std::span<const double> tau) {
  if (!(model.input_amplitude > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "g2 undefined at zero flux");
  const Matrix4c l = liouvillian(model);
  const SteadyState ss = steady_state(model);
  const Matrix2c a = model.output_operator();
  const Matrix2c n_op = a.adjoint() * a;
  const double intensity = (n_op * ss.rho).trace().real();
  const Vector4c b0 = vectorize(a * ss.rho * a.adjoint());
  // tr(N B) as a row functional on vec(B).
  const Eigen::RowVector4cd probe = vectorize(n_op.transpose()).transpose();

  std::vector<std::size_t> order(tau.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(tau[x]) < std::abs(tau[y]); });

  std::vector<double> out(tau.size());
  Vector4c state = b0;
  double at = 0.0;
  double cached_step = -1.0;
  Matrix4c step_prop = Matrix4c::Identity();
  for (std::size_t idx : order) {
    const double target = std::abs(tau[idx]);
    const double dt = target - at;
    if (dt > 0.0) {
      if (std::abs(dt - cached_step) > 1e-12 * std::max(1.0, dt)) {
        step_prop = (l * dt).exp();
        cached_step = dt;
      }
      state = step_prop * state;
      at = target;
    }
    out[idx] = (probe * state)(0).real() / (intensity * intensity);
  }
  return out;
}

CorrelationTrace g2_trace(const LindbladModel& model, const DriveSpec& drive,
                          std::span<const double> tau) {
  validate(drive);
  if (!(drive.flux_per_lifetime > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "g2 undefined at zero flux");
  const double g = model.emitter.gamma_rad;
  if (tau.size() < 2) fail(ErrorCode::OutOfRange, "tau grid needs at least two points");
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) fail(ErrorCode::OutOfRange, "tau grid must be strictly increasing");
    if (tau[i] - tau[i - 1] > 0.05 / g * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "tau spacing " << tau[i] - tau[i - 1] << " ns exceeds 0.05/Gamma = " << 0.05 / g;
      fail(ErrorCode::GridTooCoarse, os.str());
    }
  }
  if (tau.front() > -10.0 / g || tau.back() < 10.0 / g)
    fail(ErrorCode::OutOfRange, "tau grid must span at least +-10/Gamma");

  CorrelationTrace trace;
  trace.tau.assign(tau.begin(), tau.end());
  trace.values = g2_values(model, tau);
  trace.flux_per_lifetime = drive.flux_per_lifetime;
  return trace;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) fail(ErrorCode::OutOfRange, "grid count must be >= 2");
  std::vector<double> v(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + step * static_cast<double>(i);
  v.back() = hi;
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo)) fail(ErrorCode::OutOfRange, "log grid needs 0 < lo < hi");
  auto v = linspace(std::log(lo), std::log(hi), count);
  for (double& x : v) x = std::exp(x);
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace wqed
