#include "wqed/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "wqed/error.hpp"

namespace wqed {
namespace {

// Orthonormal Hermite polynomials (weight exp(-x^2)) by three-term recursion.
// Returns mantissas of p_n(x), p_{n-1}(x) sharing the factor exp(log_scale);
// rescaling keeps the recursion finite for orders in the thousands.
void hermite_poly(std::size_t n, double x, double& pn, double& pn1, double& log_scale) {
  double p0 = std::pow(std::numbers::pi, -0.25);
  double p1 = 0.0;
  log_scale = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double p2 = p1;
    p1 = p0;
    const double jd = static_cast<double>(j);
    p0 = x * std::sqrt(2.0 / jd) * p1 - std::sqrt((jd - 1.0) / jd) * p2;
    if (std::abs(p0) > 1e150) {
      p0 *= 1e-150;
      p1 *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
    }
  }
  pn = p0;
  pn1 = p1;
}

GaussRule build_rule(std::size_t n) {
  // Nodes are the eigenvalues of the symmetric Jacobi matrix (diagonal zero,
  // off-diagonal sqrt(k/2)). Only eigenvalues are needed, which keeps the
  // cost quadratic; weights then follow from the recursion.
  std::vector<double> x(n), w(n);
  const double nd = static_cast<double>(n);
  if (n == 1) {
    x[0] = 0.0;
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
    for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(0.5 * static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "Jacobi eigenvalue solve failed");
    for (std::size_t i = 0; i < n; ++i) x[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double pn = 0.0, pn1 = 0.0, log_scale = 0.0;
    // One Newton step polishes the eigenvalue; p_n' = sqrt(2n) p_{n-1}.
    hermite_poly(n, x[i], pn, pn1, log_scale);
    const double step = pn / (std::sqrt(2.0 * nd) * pn1);
    if (std::abs(step) < 1e-6 * std::max(1.0, std::abs(x[i]))) x[i] -= step;
    hermite_poly(n, x[i], pn, pn1, log_scale);
    // Christoffel weight for exp(-x^2): 1 / (n p_{n-1}^2), in log form.
    w[i] = std::exp(-std::log(nd) - 2.0 * (std::log(std::abs(pn1)) + log_scale));
  }
  // Symmetrise so the rule is exactly even.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double xs = 0.5 * (x[n - 1 - i] - x[i]);
    const double ws = 0.5 * (w[n - 1 - i] + w[i]);
    x[i] = -xs;
    x[n - 1 - i] = xs;
    w[i] = w[n - 1 - i] = ws;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  // Map to the standard normal: nodes scale by sqrt(2), weights sum to 1.
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w[i];
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = std::numbers::sqrt2 * x[i];
    rule.weights[i] = w[i] / total;
  }
  return rule;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_hermite(std::size_t order) {
  if (order < 1) fail(ErrorCode::OutOfRange, "quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const GaussRule>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto rule = std::make_shared<const GaussRule>(build_rule(order));
  cache.emplace(order, rule);
  return rule;
}

}  // namespace wqed
