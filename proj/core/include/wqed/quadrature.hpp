#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace wqed {

/// Nodes and normalised weights for E[f(X)], X ~ N(0, 1).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Hermite rule of the given order for the standard normal density.
/// Nodes are Jacobi-matrix eigenvalues; weights come from a rescaled
/// orthonormal recursion, which stays finite for orders in the thousands.
/// Rules are cached per order.
std::shared_ptr<const GaussRule> gauss_hermite(std::size_t order);

}  // namespace wqed
