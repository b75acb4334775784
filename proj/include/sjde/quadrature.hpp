#pragma once

#include <cstddef>
#include <span>

namespace sjde {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::span<const double> nodes;
  std::span<const double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Nodes are computed on first use and cached for the lifetime of the process.
// Safe to call concurrently.
GaussLegendreRule gauss_legendre(std::size_t count);

}  // namespace sjde
