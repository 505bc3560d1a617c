#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "srm/norms.hpp"
#include "srm/quadrature.hpp"

namespace srm {

/// Point of P¹ in log-polar form: s = log|z|² ∈ [−∞, +∞] in the affine chart
/// z = x/y, θ = arg z. The poles z = 0 and z = ∞ are s = −∞ and s = +∞.
/// The Fubini–Study moment coordinate is x = |z|²/(1+|z|²) = sigmoid(s).
struct Point {
  double s = 0.0;
  double theta = 0.0;

  static Point from_z(Complex z);
  static Point from_moment(double x, double theta = 0.0);
  [[nodiscard]] double moment() const { return sigmoid(s); }
  [[nodiscard]] double log_moment() const { return -softplus(-s); }      ///< log x
  [[nodiscard]] double log_co_moment() const { return -softplus(s); }    ///< log(1 − x)
  [[nodiscard]] bool is_pole() const { return std::isinf(s); }
  /// Affine coordinate; only meaningful away from z = ∞.
  [[nodiscard]] Complex z() const;
};

/// log |z^a|²_{FS,k} = a·log x + (k−a)·log(1−x), with 0·log 0 = 0.
double log_fs_monomial_sq(int k, int a, const Point& p);

/// Convex weight symbol of a toric metric: the local weight is φ = Φ(s),
/// s = log|z|², with Φ' ranging over [0, 1]. The symplectic potential Ψ on
/// the moment interval [0, 1] is its Legendre transform and s(x) = Ψ'(x)
/// (a generalized inverse of Φ').
class ToricSymbol {
public:
  virtual ~ToricSymbol() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual double phi(double s) const = 0;
  /// Bounded perturbation u = Φ − log(1 + e^s); finite at s = ±∞.
  [[nodiscard]] virtual double u(double s) const;
  /// Right derivative Φ'(s).
  [[nodiscard]] virtual double dphi(double s) const = 0;
  [[nodiscard]] virtual double psi(double x) const = 0;
  /// s(x) = Ψ'(x); ±∞ allowed at the interval ends.
  [[nodiscard]] virtual double slope_inverse(double x) const = 0;
  /// Points of (0, 1) where s(x) fails to be smooth, ascending.
  [[nodiscard]] virtual std::vector<double> breakpoints() const { return {}; }
  /// Atoms of the Monge–Ampère measure on the s-line: (s, mass).
  [[nodiscard]] virtual std::vector<std::pair<double, double>> atoms() const;
  /// True when Φ is C² (the MA measure has a density Φ''(s) ds).
  [[nodiscard]] virtual bool smooth() const { return true; }
};

using SymbolPtr = std::shared_ptr<const ToricSymbol>;

/// Φ = log(1 + e^s): the round Fubini–Study metric.
SymbolPtr round_symbol();
/// Φ = log(1 + e^s) + eps·sigmoid(s), |eps| < 1; sup |u| = |eps|.
SymbolPtr ramp_symbol(double eps);
/// Φ = (1/k) log Σ_a e^{a s} / g_a: FS root of a diagonal norm with entries g_a.
SymbolPtr fs_diagonal_symbol(const RVector& diagonal_gram, int k);
/// Φ = max_j (m_j s + c_j). Slopes must lie in [0, 1] and include 0 and 1.
SymbolPtr piecewise_affine_symbol(std::vector<double> slopes, std::vector<double> intercepts);
/// Φ = max(log(1 + e^s), c) with c > 0: atom plus absolutely continuous part.
SymbolPtr mixed_symbol(double c);
/// Symplectic-potential interpolation Ψ_t = (1 − t)Ψ₀ + tΨ₁.
SymbolPtr interpolated_symbol(SymbolPtr a, SymbolPtr b, double t);

enum class MetricKind { RoundFS, Toric, Smooth };

/// Continuous psh metric on O(1) over P¹. Weight convention: in the affine
/// chart |s(z)|²_{h^k} = |s(z)|² e^{−kφ(z)} with φ = log(1 + |z|²) + u and u
/// a bounded function on P¹.
class MetricOnL {
public:
  using Perturbation = std::function<double(const Point&)>;

  static MetricOnL round();
  static MetricOnL toric(SymbolPtr symbol, std::string name = {});
  /// Non-toric smooth metric with perturbation u (evaluated at any point,
  /// including the poles).
  static MetricOnL smooth(Perturbation u, std::string name);

  [[nodiscard]] MetricKind kind() const { return kind_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool is_toric() const { return kind_ != MetricKind::Smooth; }
  [[nodiscard]] const SymbolPtr& symbol() const;
  [[nodiscard]] double u(const Point& p) const;
  /// log |z^a|_{h^k} at p.
  [[nodiscard]] double log_monomial_norm(int k, int a, const Point& p) const;
  /// |f(p)|_{h^k}
  [[nodiscard]] double pointwise_norm(const SectionVector& f, const Point& p) const;
  /// Density of c₁(L, h) relative to the Fubini–Study area form, by finite
  /// differences in the chart (the antipodal chart beyond |z| = 1). Smooth kind only.
  [[nodiscard]] double ma_density(const Point& p) const;

private:
  MetricKind kind_ = MetricKind::RoundFS;
  std::string name_ = "round";
  SymbolPtr symbol_;
  Perturbation u_;
};

enum class QuadratureKind { Auto, ExactToric, Chart2D };

struct QuadratureScheme {
  QuadratureKind kind = QuadratureKind::Auto;
  int radial = 0;    ///< nodes per moment piece (toric) or per x_FS axis (2-D); 0 = default
  int angular = 0;   ///< trapezoid nodes in θ; 0 = default
  double tolerance = 1e-12;  ///< refinement target
  double accept = 1e-7;      ///< refinements disagreeing by more raise an accuracy error
};

/// Node of a rule integrating against the Monge–Ampère probability measure.
struct QuadratureNode {
  Point p;
  double u = 0.0;
  double weight = 0.0;
};

/// Tensor-product rule for c₁(L, h) with `radial` moment nodes per piece and
/// `angular` equispaced angles. Toric metrics use the moment pushforward,
/// smooth ones Gauss–Legendre in x_FS weighted by ma_density.
std::vector<QuadratureNode> ma_rule(const MetricOnL& h, int radial, int angular);

/// Gram of Hilb_k(h): G_ab = ∫ conj(z^a) z^b e^{−kφ} c₁(L, h), monomial basis.
HermitianNorm quadrature_gram(int k, const MetricOnL& h, const QuadratureScheme& scheme = {});

/// Diagonal of the toric gram, by piecewise Gauss–Legendre in the moment
/// coordinate of ∫₀¹ exp(kΨ(x) + (a − kx)s(x)) dx with refinement.
RVector toric_gram_diagonal(int k, const ToricSymbol& symbol, const QuadratureScheme& scheme = {});

double l1_norm(const SectionVector& f, const MetricOnL& h, const QuadratureScheme& scheme = {});

struct SupEstimate {
  double value = 0.0;
  Point argmax;
  int grid = 0;          ///< sup-grid size per axis
  double refinement = 0.0;  ///< change between grid and refined local search
};

SupEstimate linf_norm(const SectionVector& f, const MetricOnL& h, int grid = 512);

struct PshReport {
  bool ok = true;
  double min_density = 0.0;  ///< min second difference (toric) or MA density (smooth)
  std::vector<Point> offending;
};

PshReport psh_validate(const MetricOnL& h, int grid = 96);

struct DistanceEstimate {
  double value = 0.0;
  double grid_error = 0.0;
};

/// ½ sup |u₀ − u₁|.
DistanceEstimate metric_distance(const MetricOnL& h0, const MetricOnL& h1, int grid = 512);

MetricOnL toric_geodesic(const MetricOnL& h0, const MetricOnL& h1, double t);

struct VolumeForm {
  std::string kind;  ///< "toric" or "smooth"
  double total_mass = 0.0;
  double continuous_mass = 0.0;
  std::vector<std::pair<double, double>> atoms;  ///< (s, mass) on circles |z|² = e^s
  std::function<double(const Point&)> density;   ///< relative to the FS area form
};

VolumeForm ma_volume(const MetricOnL& h);

/// Length along a meridian θ = const between s₀ < s₁, for the Kähler form of
/// a toric metric (normalized to total area 1).
double toric_meridian_distance(const ToricSymbol& symbol, double s0, double s1);

/// Named metrics: round, ramp(eps), mixed(c), max-affine, dipole(eps).
struct CatalogEntry {
  std::string name;
  std::string type;
  std::vector<double> parameters;
};
MetricOnL make_metric(const CatalogEntry& entry);

}  // namespace srm
