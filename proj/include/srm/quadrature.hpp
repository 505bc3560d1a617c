#pragma once

#include <cmath>
#include <vector>

namespace srm {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1], ascending
  std::vector<double> weights;  ///< sum to 2
};

/// n-point Gauss–Legendre rule (cached, thread-safe).
const GaussRule& gauss_legendre(int n);

/// Nodes and weights of the n-point rule mapped to [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

/// Numerically stable log(1 + e^s).
inline double softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

inline double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

inline double logit(double x) { return std::log(x) - std::log1p(-x); }

}  // namespace srm
