#include "wqed/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "wqed/error.hpp"

namespace wqed {
namespace {

using cplx = std::complex<double>;
using Vector2c = Eigen::Vector2cd;
constexpr cplx kI(0.0, 1.0);

// exp(A) for a 2x2 matrix: with A = m I + B, tr B = 0, B^2 = -det(B) I.
Matrix2c expm2(const Matrix2c& a) {
  const cplx m = 0.5 * a.trace();
  const Matrix2c b = a - m * Matrix2c::Identity();
  const cplx d = std::sqrt(-b.determinant());
  cplx sinhc;
  if (std::abs(d) < 1e-6) {
    sinhc = 1.0 + d * d / 6.0;
  } else {
    sinhc = std::sinh(d) / d;
  }
  return std::exp(m) * (std::cosh(d) * Matrix2c::Identity() + sinhc * b);
}

struct BatchOutput {
  double transmission = 0.0;
  std::vector<double> g2;  // per bin
  std::uint64_t clicks = 0;
  std::uint64_t jumps = 0;
};

BatchOutput run_batch(const Unraveling& u, double flux, double duration, double burn_in, double dt,
                      double bin_width, std::size_t bins, std::uint64_t seed, int batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Matrix2c h_eff = u.hamiltonian;
  std::vector<Matrix2c> jump_ops;
  for (const auto& ch : u.channels) {
    const Matrix2c c = std::sqrt(ch.rate) * ch.op;
    jump_ops.push_back(c);
    h_eff -= 0.5 * kI * c.adjoint() * c;
  }
  const Matrix2c gen = -kI * h_eff;
  const Matrix2c step = expm2(gen * dt);

  Vector2c psi(0.0, 1.0);  // ground state
  double t = 0.0;
  const double t_end = burn_in + duration;
  double threshold = uniform(rng);
  std::vector<double> clicks;
  BatchOutput out;

  while (t < t_end) {
    Vector2c next = step * psi;
    if (next.squaredNorm() > threshold) {
      psi = next;
      t += dt;
      continue;
    }
    // The no-jump norm is monotone, so the crossing inside the step is unique.
    double lo = 0.0, hi = dt;
    for (int it = 0; it < 48; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((expm2(gen * mid) * psi).squaredNorm() > threshold) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const Vector2c at_jump = expm2(gen * hi) * psi;
    t += hi;

    double total = 0.0;
    std::array<double, 8> rates{};
    for (std::size_t k = 0; k < jump_ops.size(); ++k) {
      rates[k] = (jump_ops[k] * at_jump).squaredNorm();
      total += rates[k];
    }
    double pick = uniform(rng) * total;
    std::size_t k = 0;
    for (; k + 1 < jump_ops.size(); ++k) {
      if (pick < rates[k]) break;
      pick -= rates[k];
    }
    psi = jump_ops[k] * at_jump;
    psi /= psi.norm();
    threshold = uniform(rng);
    ++out.jumps;
    if (k == 0 && t > burn_in && t <= t_end) clicks.push_back(t);
  }

  out.clicks = clicks.size();
  out.transmission = static_cast<double>(clicks.size()) / (flux * duration);

  std::vector<double> counts(bins, 0.0);
  const double tau_max = bin_width * static_cast<double>(bins);
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    for (std::size_t j = i + 1; j < clicks.size(); ++j) {
      const double d = clicks[j] - clicks[i];
      if (d >= tau_max) break;
      const auto b = static_cast<std::size_t>(d / bin_width);
      if (b < bins) counts[b] += 1.0;
    }
  }
  const double n = static_cast<double>(clicks.size());
  const double expected = n * n / duration * bin_width;
  out.g2.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) out.g2[b] = expected > 0.0 ? counts[b] / expected : 0.0;
  return out;
}

void mean_and_se(const std::vector<double>& xs, double& mean, double& se) {
  const double n = static_cast<double>(xs.size());
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  se = xs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
}

}  // namespace

Unraveling displaced_unraveling(const LindbladModel& model) {
  // Shifting a jump operator c -> c + a leaves the Liouvillian invariant when
  // H -> H - (i/2)(a* c - a c^dagger).
  Unraveling u;
  const Matrix2c c = -kI * model.output_coupling * ops::sigma_minus();
  const double a = model.input_amplitude;
  u.hamiltonian = model.hamiltonian - 0.5 * kI * (a * c - a * c.adjoint());
  u.channels.push_back({1.0, model.output_operator(), "forward"});
  for (const auto& ch : model.channels) {
    if (ch.label == "forward") continue;
    if (ch.rate > 0.0) u.channels.push_back(ch);
  }
  return u;
}

TrajectoryResult trajectory_oracle(const LindbladModel& model, const DriveSpec& drive,
                                   const TrajectoryOptions& options) {
  validate(drive);
  if (!(drive.flux_per_lifetime > 0.0))
    fail(ErrorCode::DivisionByZeroFlux, "trajectory oracle needs a non-zero input flux");
  if (!(options.duration > 0.0)) fail(ErrorCode::OutOfRange, "duration must be > 0");
  if (options.batches < 2) fail(ErrorCode::OutOfRange, "need at least two batches");

  const double g = model.emitter.gamma_rad;
  const double bin_width = options.bin_width > 0.0 ? options.bin_width : 0.1 / g;
  const double tau_max = options.tau_max > 0.0 ? options.tau_max : 5.0 / g;
  const double burn_in = options.burn_in > 0.0 ? options.burn_in : 20.0 / g;
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::round(tau_max / bin_width)));
  const double flux = model.input_amplitude * model.input_amplitude;
  const double dt = 0.01 / std::max({g, model.drive_rabi, flux});
  const double per_batch = options.duration / options.batches;

  const Unraveling u = displaced_unraveling(model);
  std::vector<BatchOutput> outs(static_cast<std::size_t>(options.batches));
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int threads = std::min(options.threads > 0 ? options.threads : hw, options.batches);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int b = w; b < options.batches; b += threads) {
          outs[static_cast<std::size_t>(b)] =
              run_batch(u, flux, per_batch, burn_in, dt, bin_width, bins, options.seed, b);
        }
      });
    }
  }

  TrajectoryResult res;
  res.bin_width = bin_width;
  std::vector<double> ts;
  for (const auto& o : outs) {
    ts.push_back(o.transmission);
    res.forward_clicks += o.clicks;
    res.total_jumps += o.jumps;
  }
  mean_and_se(ts, res.transmission, res.transmission_se);

  std::vector<double> g2_mean(bins), g2_se(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    std::vector<double> xs;
    for (const auto& o : outs) xs.push_back(o.g2[b]);
    mean_and_se(xs, g2_mean[b], g2_se[b]);
  }
  res.g2_zero = g2_mean[0];
  res.g2_zero_se = g2_se[0];

  auto& h = res.g2_histogram;
  h.flux_per_lifetime = drive.flux_per_lifetime;
  for (std::size_t b = bins; b-- > 0;) {
    h.tau.push_back(-(static_cast<double>(b) + 0.5) * bin_width);
    h.values.push_back(g2_mean[b]);
    res.g2_se.push_back(g2_se[b]);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    h.tau.push_back((static_cast<double>(b) + 0.5) * bin_width);
    h.values.push_back(g2_mean[b]);
    res.g2_se.push_back(g2_se[b]);
  }
  return res;
}

double regression_bin_average(const LindbladModel& model, double width) {
  constexpr std::size_t kPoints = 129;  // odd, Simpson
  const auto grid = linspace(0.0, width, kPoints);
  const auto g2 = g2_values(model, grid);
  const double h = width / static_cast<double>(kPoints - 1);
  double acc = g2.front() + g2.back();
  for (std::size_t i = 1; i + 1 < kPoints; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * g2[i];
  return acc * h / 3.0 / width;
}

}  // namespace wqed
