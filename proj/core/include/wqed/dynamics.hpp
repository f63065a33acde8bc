#pragma once

// Coherently driven, damped two-level emitter: Lindblad steady state,
// input-output transmission and two-time correlations by quantum regression.
//
// Basis ordering is (|e>, |g>); sigma_minus = |g><e|. Density matrices are
// vectorised column-major, so vec(A rho B) = (B^T kron A) vec(rho).

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wqed/params.hpp"

namespace wqed {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

namespace ops {
Matrix2c sigma_minus();
Matrix2c sigma_plus();
Matrix2c sigma_z();
Matrix2c identity();
}  // namespace ops

struct CollapseChannel {
  double rate = 0.0;  // ns^-1
  Matrix2c op;        // unscaled jump operator
  std::string label;
};

struct LindbladModel {
  Matrix2c hamiltonian;  // rotating frame, ns^-1
  std::vector<CollapseChannel> channels;
  double drive_rabi = 0.0;       // Omega, ns^-1
  double input_amplitude = 0.0;  // sqrt(Phi), Phi in photons / ns
  double output_coupling = 0.0;  // sqrt(beta Gamma / 2)
  EmitterParams emitter;
  DriveSpec drive;

  /// a_out = input_amplitude * 1 - i * output_coupling * sigma_minus.
  Matrix2c output_operator() const;
};

struct SteadyState {
  Matrix2c rho;
  double excited_population = 0.0;
  std::complex<double> coherence;  // <sigma_minus>
};

struct Transmission {
  double total = 0.0;
  double coherent = 0.0;
  double incoherent = 0.0;
};

/// H = -delta Gamma sigma+ sigma- + (Omega/2)(sigma+ + sigma-), with
/// Omega = sqrt(2 beta Gamma Phi) and Phi = n Gamma.
LindbladModel build_model(const EmitterParams& emitter, const DriveSpec& drive);

/// 4x4 superoperator of the model.
Matrix4c liouvillian(const LindbladModel& model);
Matrix4c liouvillian(const Matrix2c& hamiltonian, std::span<const CollapseChannel> channels);

Vector4c vectorize(const Matrix2c& rho);
Matrix2c unvectorize(const Vector4c& v);

/// Null space of the Liouvillian with unit trace. Throws NumericalFailure
/// when the residual exceeds 1e-10.
SteadyState steady_state(const LindbladModel& model);

/// Closed-form optical Bloch steady state; must agree with steady_state().
SteadyState bloch_steady_state(const EmitterParams& emitter, const DriveSpec& drive);

/// Forward transmitted intensity normalised to the input flux.
Transmission transmission(const LindbladModel& model, const DriveSpec& drive);
Transmission transmission(const LindbladModel& model, const SteadyState& ss);

/// Same quantity through the closed-form Bloch solution. Used by the noise
/// ensemble and the fitter where millions of evaluations are needed.
Transmission transmission_closed_form(const EmitterParams& emitter, const DriveSpec& drive);

/// Weak-drive (n -> 0) limits of T_total and of the zero-delay two-photon
/// coincidence G2(0) / |alpha_in|^4, from the Bloch solution expanded in n.
struct WeakDriveLimit {
  double transmission = 0.0;
  double coincidence = 0.0;
  double g2_zero() const { return coincidence / (transmission * transmission); }
};
WeakDriveLimit weak_drive_limit(const EmitterParams& emitter, double detuning);

/// g2 of the forward output by quantum regression, on an arbitrary grid
/// (ns). No grid contract is enforced; see g2_trace.
std::vector<double> g2_values(const LindbladModel& model, std::span<const double> tau);

/// g2(tau) on a grid that spans +-10/Gamma with spacing <= 0.05/Gamma.
CorrelationTrace g2_trace(const LindbladModel& model, const DriveSpec& drive,
                          std::span<const double> tau);

/// Resonant transmission contrast 1 - T(n), noise-averaged when `noise` is
/// non-trivial. n = 0 evaluates the weak-drive limit.
double saturation_contrast(const EmitterParams& emitter, const NoiseModel& noise, double flux);

/// Flux per lifetime at which the resonant contrast falls to half its
/// weak-drive value (bisection in log n, relative tolerance 1e-6).
double critical_flux(const EmitterParams& emitter, const NoiseModel& noise = {});

/// Evenly spaced grid helper, endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> logspace(double lo, double hi, std::size_t count);

}  // namespace wqed
