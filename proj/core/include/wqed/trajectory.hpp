#pragma once

// Quantum-jump Monte Carlo of the same Lindblad model, used as an independent
// check of the steady-state and regression solvers. The forward port is
// unravelled in the displaced frame, so every forward jump is a detected
// transmitted photon including the coherent laser background.

#include <cstdint>
#include <vector>

#include "wqed/dynamics.hpp"

namespace wqed {

/// Hamiltonian and jump operators whose Liouvillian equals the model's, with
/// the forward channel replaced by a_out (rate 1, operator a_out).
struct Unraveling {
  Matrix2c hamiltonian;
  std::vector<CollapseChannel> channels;  // channels[0] is the forward port
};

Unraveling displaced_unraveling(const LindbladModel& model);

struct TrajectoryOptions {
  double duration = 0.0;   // total simulated time over all batches, ns
  std::uint64_t seed = 1;
  int batches = 16;        // independent trajectories for error estimates
  double bin_width = 0.0;  // g2 histogram bin, ns; 0 -> 0.1 / Gamma
  double tau_max = 0.0;    // histogram range, ns; 0 -> 5 / Gamma
  double burn_in = 0.0;    // discarded per batch, ns; 0 -> 20 / Gamma
  int threads = 0;         // 0 -> hardware concurrency
};

struct TrajectoryResult {
  double transmission = 0.0;
  double transmission_se = 0.0;
  /// Bin-averaged g2 at the bin centres, mirrored to negative delays.
  CorrelationTrace g2_histogram;
  std::vector<double> g2_se;
  double g2_zero = 0.0;  // first bin, [0, bin_width)
  double g2_zero_se = 0.0;
  double bin_width = 0.0;
  std::uint64_t forward_clicks = 0;
  std::uint64_t total_jumps = 0;
};

TrajectoryResult trajectory_oracle(const LindbladModel& model, const DriveSpec& drive,
                                   const TrajectoryOptions& options);

/// Mean of the regression g2 over [0, width], for comparison with the first
/// histogram bin.
double regression_bin_average(const LindbladModel& model, double width);

}  // namespace wqed
