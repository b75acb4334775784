#include "sjde/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sjde {
namespace {

struct StoredRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Newton iteration on P_n from the Tricomi initial guess; symmetric pairs are
// filled together so the rule is exactly symmetric.
StoredRule build_rule(std::size_t n) {
  StoredRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      derivative = dn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

GaussLegendreRule gauss_legendre(std::size_t count) {
  if (count < 2) throw std::invalid_argument("Gauss-Legendre rule needs at least 2 nodes");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<StoredRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[count];
  if (!slot) slot = std::make_unique<StoredRule>(build_rule(count));
  return {slot->nodes, slot->weights};
}

}  // namespace sjde
