#pragma once

#include <vector>

#include "srm/geometry.hpp"

namespace srm {

/// Reproducing kernel of (H⁰(P¹, O(k)), Hilb_k(h)), read through the weighted
/// monomial values e_a(p) = e^{iaθ}|z^a|_{h^k}(p):
/// B_k(x, y) = e(x)^T G⁻¹ conj(e(y)).
class BergmanEvaluator {
public:
  BergmanEvaluator(int k, MetricOnL h, const QuadratureScheme& scheme = {});
  BergmanEvaluator(int k, MetricOnL h, HermitianNorm gram);

  [[nodiscard]] int degree() const { return k_; }
  [[nodiscard]] const MetricOnL& metric() const { return h_; }
  [[nodiscard]] const HermitianNorm& gram() const { return gram_; }

  [[nodiscard]] CVector weighted_values(const Point& p) const;
  /// Values at p of the orthonormal basis s_i = Σ_a (L⁻ᴴ)_{ai} z^a.
  [[nodiscard]] CVector orthonormal_values(const Point& p) const;
  [[nodiscard]] Complex kernel(const Point& x, const Point& y) const;
  [[nodiscard]] double kernel_norm(const Point& x, const Point& y) const { return std::abs(kernel(x, y)); }
  [[nodiscard]] double diagonal(const Point& x) const;

private:
  int k_;
  MetricOnL h_;
  HermitianNorm gram_;
};

/// ∫ B_k(x, y) f(y) dv(y) − f(x), maximized over `points` and divided by sup|f| there.
double reproducing_residual(const BergmanEvaluator& ev, const SectionVector& f, const std::vector<Point>& points);

/// ∫ B_k(x, x) dv(x).
double kernel_trace(const BergmanEvaluator& ev);

struct DecayRow {
  int k = 0;
  double dist = 0.0;
  double log_kernel = 0.0;  ///< log(|B_k(x, y)|/k)
};

struct DecayFit {
  std::vector<DecayRow> rows;
  double log_c_envelope = 0.0;  ///< log C, shared across degrees
  std::vector<int> degrees;
  std::vector<double> rate;     ///< per-degree c_k = inf over pairs of (log C − log_kernel)/(√k·dist)
  double fitted_c = 0.0;        ///< min over degrees of c_k
  double doubling_ratio = 0.0;  ///< max over k, 2k in the scan of c_{2k}/c_k or its inverse
  [[nodiscard]] bool decays() const { return fitted_c > 0.0; }
};

/// Exponential off-diagonal decay along the meridian θ = 0 from base point x0
/// (toric metrics): |B_k(x, y)| ≤ C k e^{−c√k d(x, y)} with d the distance of
/// c₁(L, h). Pairs are (x0, y_j) with y_j on `targets` moment values.
DecayFit off_diagonal_decay_scan(const MetricOnL& h, const std::vector<int>& degrees, double x0_moment = 0.5,
                                 int targets = 80);

/// P₁(Z, Z') = exp(−π/2·(|Z|² + |Z'|² − 2 Z conj(Z'))).
Complex model_kernel(Complex z, Complex zp);

/// Local chart at x0 (the z chart when |z0| ≤ 1, the w = 1/z chart beyond)
/// scaled so that Euclidean length matches c₁(L, h) at x0.
struct NormalChart {
  Point x0;
  bool antipodal = false;
  Complex center;  ///< chart coordinate of x0
  double scale = 1.0;  ///< W = scale·(chart − center)
  /// Z = W + quadratic·W² removes the cubic term of the local potential, so
  /// the model comparison is off by O(|Z|⁴) rather than O(|Z|³).
  Complex quadratic;

  static NormalChart at(const MetricOnL& h, const Point& x0);
  [[nodiscard]] Point point(Complex z) const;
};

/// | k⁻¹|B_k(exp Z, exp Z')| − |P₁(√k Z, √k Z')| | in the normal chart; the
/// moduli are compared since the phase depends on the local frame.
double near_diagonal_residual(const BergmanEvaluator& ev, const NormalChart& chart, Complex z, Complex zp,
                              double eps = 0.1);

struct ProjectorBound {
  double value = 0.0;  ///< max over probe points of ∫|B_k(x0, x)| dv(x)
  Point argmax;
};

/// L¹ row integral bound of the Bergman projector (equal to its L¹ and L∞
/// operator-norm bound by symmetry of |B_k|).
ProjectorBound projector_lp_bound(const BergmanEvaluator& ev, const std::vector<Point>& probes);
ProjectorBound projector_lp_bound(const BergmanEvaluator& ev, int probe_count = 9);

struct BernsteinMarkov {
  double rho = 0.0;       ///< sup_x √B_k(x, x)
  double log_rate = 0.0;  ///< log(ρ_k)/k
  Point argmax;
};

BernsteinMarkov bernstein_markov_ratio(const BergmanEvaluator& ev, int grid = 256);

}  // namespace srm
