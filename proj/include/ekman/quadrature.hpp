#pragma once

#include "ekman/types.hpp"

namespace ekman {

struct GaussRule {
  RealVector nodes;    // on [-1, 1]
  RealVector weights;
};

/// n-point Gauss-Legendre rule from the Jacobi matrix eigenproblem (Golub-Welsch).
GaussRule gauss_legendre(int n);

/// Integral of f over [a, b] with a fixed rule, split into `panels` equal panels.
template <typename F>
auto integrate(const GaussRule& rule, F&& f, double a, double b, int panels = 1) {
  using R = decltype(f(a));
  R sum{};
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      sum += rule.weights[i] * f(lo + 0.5 * w * (rule.nodes[i] + 1.0));
    }
  }
  return sum * (0.5 * w);
}

}  // namespace ekman
