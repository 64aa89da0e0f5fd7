#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace busemann::detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

/// Composite Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate(F&& f, double a, double b, int panels = 8, int order = 16) {
  static thread_local int cached_order = -1;
  static thread_local GaussRule rule;
  if (cached_order != order) {
    rule = gauss_legendre(order);
    cached_order = order;
  }
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i) s += rule.weights[i] * f(lo + 0.5 * h * (rule.nodes[i] + 1.0));
  }
  return s * 0.5 * h;
}

}  // namespace busemann::detail
