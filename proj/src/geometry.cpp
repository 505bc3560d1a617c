#include "srm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// log(x) where 0·log 0 terms must vanish: the caller multiplies by an exponent
// that may be zero.
double weighted_log(double exponent, double log_value) { return exponent == 0.0 ? 0.0 : exponent * log_value; }

std::vector<double> piece_edges(const ToricSymbol& symbol) {
  std::vector<double> edges{0.0};
  for (double b : symbol.breakpoints())
    if (b > edges.back() + 1e-15 && b < 1.0 - 1e-15) edges.push_back(b);
  edges.push_back(1.0);
  return edges;
}

}  // namespace

Point Point::from_z(Complex z) {
  if (std::isinf(std::abs(z))) return {kInf, 0.0};
  const double r2 = std::norm(z);
  return {r2 == 0.0 ? -kInf : std::log(r2), r2 == 0.0 ? 0.0 : std::arg(z)};
}

Point Point::from_moment(double x, double theta) {
  if (x <= 0.0) return {-kInf, theta};
  if (x >= 1.0) return {kInf, theta};
  return {logit(x), theta};
}

Complex Point::z() const {
  if (s == -kInf) return {0.0, 0.0};
  return std::polar(std::exp(0.5 * s), theta);
}

double log_fs_monomial_sq(int k, int a, const Point& p) {
  return weighted_log(a, p.log_moment()) + weighted_log(k - a, p.log_co_moment());
}

// ---------------------------------------------------------------------------
// Toric symbols

double ToricSymbol::u(double s) const {
  if (s == -kInf) return -psi(0.0);
  if (s == kInf) return -psi(1.0);
  return phi(s) - softplus(s);
}

std::vector<std::pair<double, double>> ToricSymbol::atoms() const {
  std::vector<std::pair<double, double>> out;
  const std::vector<double> edges = piece_edges(*this);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double s1 = slope_inverse(a + 0.25 * (b - a));
    const double s2 = slope_inverse(a + 0.5 * (b - a));
    const double s3 = slope_inverse(a + 0.75 * (b - a));
    if (std::isfinite(s2) && std::abs(s1 - s2) < 1e-12 * (1 + std::abs(s2)) &&
        std::abs(s3 - s2) < 1e-12 * (1 + std::abs(s2)))
      out.emplace_back(s2, b - a);
  }
  return out;
}

namespace {

class RoundSymbol final : public ToricSymbol {
public:
  std::string name() const override { return "round"; }
  double phi(double s) const override { return softplus(s); }
  double u(double) const override { return 0.0; }
  double dphi(double s) const override { return sigmoid(s); }
  double psi(double x) const override {
    return weighted_log(x, std::log(x)) + weighted_log(1.0 - x, std::log1p(-x));
  }
  double slope_inverse(double x) const override {
    if (x <= 0.0) return -kInf;
    if (x >= 1.0) return kInf;
    return logit(x);
  }
};

class RampSymbol final : public ToricSymbol {
public:
  explicit RampSymbol(double eps) : eps_(eps) {
    if (!(std::abs(eps) < 1.0)) throw Error(ErrorKind::Range, "ramp height must satisfy |eps| < 1");
  }
  std::string name() const override { return "ramp(" + std::to_string(eps_) + ")"; }
  double phi(double s) const override { return softplus(s) + eps_ * sigmoid(s); }
  double u(double s) const override {
    if (s == -kInf) return 0.0;
    if (s == kInf) return eps_;
    return eps_ * sigmoid(s);
  }
  double dphi(double s) const override {
    const double p = sigmoid(s);
    return p + eps_ * p * (1.0 - p);
  }
  // p = sigmoid(s(x)) solves p + eps·p(1 − p) = x.
  double inverse_sigmoid(double x) const {
    return 2.0 * x / ((1.0 + eps_) + std::sqrt((1.0 + eps_) * (1.0 + eps_) - 4.0 * eps_ * x));
  }
  double psi(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return -eps_;
    const double p = inverse_sigmoid(x);
    return x * std::log(p) + (1.0 - x) * std::log1p(-p) - eps_ * p;
  }
  double slope_inverse(double x) const override {
    if (x <= 0.0) return -kInf;
    if (x >= 1.0) return kInf;
    const double p = inverse_sigmoid(x);
    return std::log(p) - std::log1p(-p);
  }

private:
  double eps_;
};

// Φ = (1/k) log Σ_a e^{a s}/g_a
class FsDiagonalSymbol final : public ToricSymbol {
public:
  FsDiagonalSymbol(const RVector& g, int k) : k_(k), log_inv_(-g.array().log()) {
    if (k < 1 || g.size() != k + 1 || g.minCoeff() <= 0.0)
      throw Error(ErrorKind::Range, "diagonal FS symbol needs k >= 1 and k + 1 positive entries");
  }
  std::string name() const override { return "fs-diagonal(" + std::to_string(k_) + ")"; }
  double lse(double s, RVector* probs = nullptr) const {
    RVector e(k_ + 1);
    for (int a = 0; a <= k_; ++a) e(a) = a * s + log_inv_(a);
    const double m = e.maxCoeff();
    const RVector w = (e.array() - m).exp();
    const double sum = w.sum();
    if (probs) *probs = w / sum;
    return m + std::log(sum);
  }
  double phi(double s) const override { return lse(s) / k_; }
  double u(double s) const override {
    if (s == -kInf) return log_inv_(0) / k_;
    if (s == kInf) return log_inv_(k_) / k_;
    return lse(s) / k_ - softplus(s);
  }
  double dphi(double s) const override {
    RVector p;
    lse(s, &p);
    double mean = 0.0;
    for (int a = 0; a <= k_; ++a) mean += a * p(a);
    return mean / k_;
  }
  double d2phi(double s) const {
    RVector p;
    lse(s, &p);
    double m1 = 0.0, m2 = 0.0;
    for (int a = 0; a <= k_; ++a) {
      m1 += a * p(a);
      m2 += double(a) * a * p(a);
    }
    return (m2 - m1 * m1) / k_;
  }
  double slope_inverse(double x) const override {
    if (x <= 0.0) return -kInf;
    if (x >= 1.0) return kInf;
    // Bracket, then safeguarded Newton on Φ'(s) = x.
    double lo = logit(x) - 8.0, hi = logit(x) + 8.0;
    while (dphi(lo) > x) lo -= 2.0 * (hi - lo);
    while (dphi(hi) < x) hi += 2.0 * (hi - lo);
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = dphi(s) - x;
      if (f > 0) hi = s; else lo = s;
      const double d = d2phi(s);
      double next = d > 0 ? s - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) < 1e-15 * (1.0 + std::abs(s))) return next;
      s = next;
    }
    return s;
  }
  double psi(double x) const override {
    if (x <= 0.0) return -log_inv_(0) / k_;
    if (x >= 1.0) return -log_inv_(k_) / k_;
    const double s = slope_inverse(x);
    return x * s - phi(s);
  }

private:
  int k_;
  RVector log_inv_;
};

// Φ = max_j (m_j s + c_j); Ψ is the lower convex hull of the points (m_j, −c_j).
class PiecewiseAffineSymbol final : public ToricSymbol {
public:
  PiecewiseAffineSymbol(std::vector<double> m, std::vector<double> c) {
    if (m.size() != c.size() || m.empty()) throw Error(ErrorKind::Range, "slopes and intercepts differ in length");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] < 0.0 || m[i] > 1.0) throw Error(ErrorKind::Range, "affine slopes must lie in [0, 1]");
      pts.emplace_back(m[i], -c[i]);
    }
    std::sort(pts.begin(), pts.end());
    if (pts.front().first != 0.0 || pts.back().first != 1.0)
      throw Error(ErrorKind::Range, "affine pieces must include slopes 0 and 1");
    // Keep the lowest point per slope, then the lower hull.
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : pts)
      if (uniq.empty() || uniq.back().first != p.first) uniq.push_back(p);
    for (const auto& p : uniq) {
      while (hull_.size() >= 2) {
        const auto& a = hull_[hull_.size() - 2];
        const auto& b = hull_.back();
        const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
        if (cross <= 0.0) hull_.pop_back(); else break;
      }
      hull_.push_back(p);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      slopes_.push_back(m[i]);
      intercepts_.push_back(c[i]);
    }
  }
  std::string name() const override { return "max-affine"; }
  bool smooth() const override { return false; }
  double phi(double s) const override {
    double v = -kInf;
    for (std::size_t i = 0; i < slopes_.size(); ++i) v = std::max(v, slopes_[i] * s + intercepts_[i]);
    return v;
  }
  double dphi(double s) const override {
    double best = -kInf, slope = 0.0;
    for (std::size_t i = 0; i < slopes_.size(); ++i) {
      const double v = slopes_[i] * s + intercepts_[i];
      if (v > best + 1e-14 || (std::abs(v - best) <= 1e-14 && slopes_[i] > slope)) {
        best = std::max(best, v);
        slope = slopes_[i];
      }
    }
    return slope;
  }
  std::size_t segment(double x) const {
    std::size_t j = 0;
    while (j + 2 < hull_.size() && x >= hull_[j + 1].first) ++j;
    return j;
  }
  double psi(double x) const override {
    const std::size_t j = segment(x);
    const auto& a = hull_[j];
    const auto& b = hull_[j + 1];
    return a.second + (b.second - a.second) * (x - a.first) / (b.first - a.first);
  }
  double slope_inverse(double x) const override {
    const std::size_t j = segment(x);
    return (hull_[j + 1].second - hull_[j].second) / (hull_[j + 1].first - hull_[j].first);
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b;
    for (std::size_t j = 1; j + 1 < hull_.size(); ++j) b.push_back(hull_[j].first);
    return b;
  }
  std::vector<std::pair<double, double>> atoms() const override {
    std::vector<std::pair<double, double>> out;
    for (std::size_t j = 0; j + 1 < hull_.size(); ++j)
      out.emplace_back((hull_[j + 1].second - hull_[j].second) / (hull_[j + 1].first - hull_[j].first),
                       hull_[j + 1].first - hull_[j].first);
    return out;
  }

private:
  std::vector<double> slopes_, intercepts_;
  std::vector<std::pair<double, double>> hull_;
};

// Φ = max(log(1 + e^s), c)
class MixedSymbol final : public ToricSymbol {
public:
  explicit MixedSymbol(double c) : c_(c), sc_(std::log(std::expm1(c))), xc_(-std::expm1(-c)) {
    if (!(c > 0.0)) throw Error(ErrorKind::Range, "mixed symbol level must be positive");
  }
  std::string name() const override { return "mixed(" + std::to_string(c_) + ")"; }
  bool smooth() const override { return false; }
  double phi(double s) const override { return std::max(softplus(s), c_); }
  double u(double s) const override {
    if (s == kInf) return 0.0;
    if (s == -kInf) return c_;
    return std::max(0.0, c_ - softplus(s));
  }
  double dphi(double s) const override { return s < sc_ ? 0.0 : sigmoid(s); }
  double psi(double x) const override {
    if (x <= xc_) return x * sc_ - c_;
    return weighted_log(x, std::log(x)) + weighted_log(1.0 - x, std::log1p(-x));
  }
  double slope_inverse(double x) const override {
    if (x <= xc_) return sc_;
    if (x >= 1.0) return kInf;
    return logit(x);
  }
  std::vector<double> breakpoints() const override { return {xc_}; }

private:
  double c_, sc_, xc_;
};

class InterpolatedSymbol final : public ToricSymbol {
public:
  InterpolatedSymbol(SymbolPtr a, SymbolPtr b, double t) : a_(std::move(a)), b_(std::move(b)), t_(t) {}
  std::string name() const override {
    return "geodesic(" + a_->name() + "," + b_->name() + ";" + std::to_string(t_) + ")";
  }
  bool smooth() const override { return a_->smooth() && b_->smooth(); }
  double psi(double x) const override { return (1.0 - t_) * a_->psi(x) + t_ * b_->psi(x); }
  double slope_inverse(double x) const override {
    const double sa = a_->slope_inverse(x), sb = b_->slope_inverse(x);
    if (std::isinf(sa) || std::isinf(sb)) return std::isinf(sa) ? sa : sb;
    return (1.0 - t_) * sa + t_ * sb;
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out = a_->breakpoints();
    for (double v : b_->breakpoints()) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  // Maximizer x* of x s − Ψ(x): s_t(x) is nondecreasing, bisect in logit(x).
  double argmax(double s) const {
    double lo = -40.0, hi = 40.0;
    if (slope_inverse(sigmoid(lo)) >= s) return sigmoid(lo);
    if (slope_inverse(sigmoid(hi)) <= s) return sigmoid(hi);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (slope_inverse(sigmoid(mid)) < s) lo = mid; else hi = mid;
    }
    return sigmoid(0.5 * (lo + hi));
  }
  double phi(double s) const override {
    const double x = argmax(s);
    return x * s - psi(x);
  }
  double dphi(double s) const override { return argmax(s); }

private:
  SymbolPtr a_, b_;
  double t_;
};

}  // namespace

SymbolPtr round_symbol() {
  static const SymbolPtr r = std::make_shared<RoundSymbol>();
  return r;
}
SymbolPtr ramp_symbol(double eps) { return std::make_shared<RampSymbol>(eps); }
SymbolPtr fs_diagonal_symbol(const RVector& g, int k) { return std::make_shared<FsDiagonalSymbol>(g, k); }
SymbolPtr piecewise_affine_symbol(std::vector<double> slopes, std::vector<double> intercepts) {
  return std::make_shared<PiecewiseAffineSymbol>(std::move(slopes), std::move(intercepts));
}
SymbolPtr mixed_symbol(double c) { return std::make_shared<MixedSymbol>(c); }
SymbolPtr interpolated_symbol(SymbolPtr a, SymbolPtr b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::Range, "interpolation parameter must lie in [0, 1]");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return std::make_shared<InterpolatedSymbol>(std::move(a), std::move(b), t);
}

// ---------------------------------------------------------------------------
// Metrics

MetricOnL MetricOnL::round() {
  MetricOnL m;
  m.kind_ = MetricKind::RoundFS;
  m.name_ = "round";
  m.symbol_ = round_symbol();
  return m;
}

MetricOnL MetricOnL::toric(SymbolPtr symbol, std::string name) {
  if (!symbol) throw Error(ErrorKind::Precondition, "null toric symbol");
  MetricOnL m;
  m.kind_ = MetricKind::Toric;
  m.name_ = name.empty() ? symbol->name() : std::move(name);
  m.symbol_ = std::move(symbol);
  return m;
}

MetricOnL MetricOnL::smooth(Perturbation u, std::string name) {
  MetricOnL m;
  m.kind_ = MetricKind::Smooth;
  m.name_ = std::move(name);
  m.u_ = std::move(u);
  return m;
}

const SymbolPtr& MetricOnL::symbol() const {
  if (!symbol_) throw Error(ErrorKind::Unsupported, "metric " + name_ + " is not toric");
  return symbol_;
}

double MetricOnL::u(const Point& p) const { return symbol_ ? symbol_->u(p.s) : u_(p); }

double MetricOnL::log_monomial_norm(int k, int a, const Point& p) const {
  return 0.5 * log_fs_monomial_sq(k, a, p) - 0.5 * k * u(p);
}

double MetricOnL::pointwise_norm(const SectionVector& f, const Point& p) const {
  const int k = f.degree;
  Complex acc = 0.0;
  for (int a = 0; a <= k; ++a) {
    if (f.coeffs(a) == Complex(0.0)) continue;
    acc += f.coeffs(a) * std::polar(std::exp(0.5 * log_fs_monomial_sq(k, a, p)), a * p.theta);
  }
  return std::abs(acc) * std::exp(-0.5 * k * u(p));
}

double MetricOnL::ma_density(const Point& p) const {
  if (symbol_) {
    if (p.is_pole() || !symbol_->smooth()) throw Error(ErrorKind::Unsupported, "toric density off the smooth locus");
    const double h = 1e-4;
    const double d2 = (symbol_->dphi(p.s + h) - symbol_->dphi(p.s - h)) / (2.0 * h);
    const double x = sigmoid(p.s);
    return d2 / (x * (1.0 - x));
  }
  const bool antipodal = p.s > 0.0;
  const Complex zeta = antipodal ? (p.s == kInf ? Complex(0.0) : 1.0 / p.z()) : p.z();
  auto eval = [&](Complex c) {
    if (!antipodal) return u_(Point::from_z(c));
    return c == Complex(0.0) ? u_(Point{kInf, 0.0}) : u_(Point::from_z(1.0 / c));
  };
  const double h = 2e-4;
  const double lap = (eval(zeta + h) + eval(zeta - h) + eval(zeta + Complex(0, h)) + eval(zeta - Complex(0, h)) -
                      4.0 * eval(zeta)) /
                     (h * h);
  const double r2 = std::norm(zeta);
  return 1.0 + lap * (1.0 + r2) * (1.0 + r2) / 4.0;
}

// ---------------------------------------------------------------------------
// Quadrature

std::vector<QuadratureNode> ma_rule(const MetricOnL& h, int radial, int angular) {
  std::vector<QuadratureNode> out;
  std::vector<double> xs, ws;
  if (h.is_toric()) {
    const ToricSymbol& sym = *h.symbol();
    const std::vector<double> edges = piece_edges(sym);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      gauss_legendre(radial, edges[i], edges[i + 1], xs, ws);
      for (int n = 0; n < radial; ++n) {
        const double s = sym.slope_inverse(xs[n]);
        // Φ(s(x)) = x·s(x) − Ψ(x)
        const double u = xs[n] * s - sym.psi(xs[n]) - softplus(s);
        for (int j = 0; j < angular; ++j) out.push_back({Point{s, kTwoPi * j / angular}, u, ws[n] / angular});
      }
    }
    return out;
  }
  gauss_legendre(radial, 0.0, 1.0, xs, ws);
  for (int n = 0; n < radial; ++n)
    for (int j = 0; j < angular; ++j) {
      const Point p = Point::from_moment(xs[n], kTwoPi * j / angular);
      out.push_back({p, h.u(p), ws[n] * h.ma_density(p) / angular});
    }
  return out;
}

RVector toric_gram_diagonal(int k, const ToricSymbol& sym, const QuadratureScheme& scheme) {
  if (k < 0) throw Error(ErrorKind::Range, "degree must be non-negative");
  const std::vector<double> edges = piece_edges(sym);
  auto evaluate = [&](int n) {
    RVector g = RVector::Zero(k + 1);
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      gauss_legendre(n, edges[i], edges[i + 1], xs, ws);
      for (int j = 0; j < n; ++j) {
        const double x = xs[j];
        const double s = sym.slope_inverse(x);
        const double base = k * sym.psi(x) - k * x * s;
        for (int a = 0; a <= k; ++a) g(a) += ws[j] * std::exp(base + a * s);
      }
    }
    return g;
  };
  int n = scheme.radial > 0 ? scheme.radial : std::max(48, k + 8);
  RVector coarse = evaluate(n);
  double diff = kInf;
  for (; n <= 8192; n *= 2) {
    RVector fine = evaluate(2 * n);
    diff = ((fine - coarse).array().abs() / fine.array()).maxCoeff();
    coarse = std::move(fine);
    if (diff < scheme.tolerance) break;
  }
  if (!(diff <= scheme.accept))
    throw Error(ErrorKind::Accuracy, "toric gram quadrature did not converge (relative change " +
                                         std::to_string(diff) + ")");
  return coarse;
}

namespace {

CMatrix smooth_gram(int k, const MetricOnL& h, int radial, int angular) {
  const std::vector<QuadratureNode> nodes = ma_rule(h, radial, angular);
  // Fourier reduction: for each radial node accumulate A_m = Σ_θ w e^{imθ} e^{−ku}.
  CMatrix g = CMatrix::Zero(k + 1, k + 1);
  for (int n = 0; n < radial; ++n) {
    std::vector<Complex> modes(2 * k + 1, 0.0);
    const Point& p0 = nodes[static_cast<std::size_t>(n) * angular].p;
    for (int j = 0; j < angular; ++j) {
      const QuadratureNode& q = nodes[static_cast<std::size_t>(n) * angular + j];
      const double base = q.weight * std::exp(-k * q.u);
      for (int m = -k; m <= k; ++m) modes[m + k] += base * std::polar(1.0, m * q.p.theta);
    }
    std::vector<double> mono(k + 1);
    for (int a = 0; a <= k; ++a) mono[a] = std::exp(0.5 * log_fs_monomial_sq(k, a, p0));
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b) g(a, b) += mono[a] * mono[b] * modes[b - a + k];
  }
  return g;
}

}  // namespace

HermitianNorm quadrature_gram(int k, const MetricOnL& h, const QuadratureScheme& scheme) {
  if (k < 0) throw Error(ErrorKind::Range, "degree must be non-negative");
  const bool toric = scheme.kind == QuadratureKind::ExactToric ||
                     (scheme.kind == QuadratureKind::Auto && h.is_toric());
  if (toric) return HermitianNorm::diagonal(toric_gram_diagonal(k, *h.symbol(), scheme), monomial_basis(k));

  int radial = scheme.radial > 0 ? scheme.radial : std::max(128, 2 * k + 16);
  int angular = scheme.angular > 0 ? scheme.angular : std::max(128, 2 * k + 16);
  CMatrix coarse = smooth_gram(k, h, radial, angular);
  double diff = kInf;
  for (; radial <= 1024; radial *= 2, angular *= 2) {
    CMatrix fine = smooth_gram(k, h, 2 * radial, 2 * angular);
    const RVector d = fine.diagonal().real().cwiseSqrt();
    diff = ((fine - coarse).cwiseAbs().array() / (d * d.transpose()).array()).maxCoeff();
    coarse = std::move(fine);
    if (diff < scheme.tolerance) break;
  }
  if (!(diff <= scheme.accept))
    throw Error(ErrorKind::Accuracy, "gram quadrature did not converge (relative change " + std::to_string(diff) + ")");
  return HermitianNorm(coarse, monomial_basis(k));
}

double l1_norm(const SectionVector& f, const MetricOnL& h, const QuadratureScheme& scheme) {
  const int k = f.degree;
  int nonzero = 0;
  for (int a = 0; a <= k; ++a) nonzero += f.coeffs(a) != Complex(0.0);
  auto evaluate = [&](int radial, int angular) {
    double acc = 0.0;
    for (const QuadratureNode& q : ma_rule(h, radial, angular)) {
      Complex v = 0.0;
      for (int a = 0; a <= k; ++a)
        if (f.coeffs(a) != Complex(0.0))
          v += f.coeffs(a) * std::polar(std::exp(0.5 * log_fs_monomial_sq(k, a, q.p) - 0.5 * k * q.u), a * q.p.theta);
      acc += q.weight * std::abs(v);
    }
    return acc;
  };
  int radial = scheme.radial > 0 ? scheme.radial : std::max(64, 2 * k + 16);
  int angular = nonzero <= 1 ? 1 : (scheme.angular > 0 ? scheme.angular : std::max(64, 4 * k + 16));
  double coarse = evaluate(radial, angular);
  double diff = kInf;
  // |f| has conical kinks at the zeros of f, so refinement converges only algebraically.
  const double target = std::max(scheme.tolerance, 1e-7);
  for (; radial <= 2048; radial *= 2) {
    if (nonzero > 1) angular *= 2;
    const double fine = evaluate(2 * radial, angular);
    diff = std::abs(fine - coarse) / std::max(fine, 1e-300);
    coarse = fine;
    if (diff < target) break;
  }
  if (!(diff <= 1e-5)) throw Error(ErrorKind::Accuracy, "L1 quadrature did not converge");
  return coarse;
}

SupEstimate linf_norm(const SectionVector& f, const MetricOnL& h, int grid) {
  const int k = f.degree;
  int nonzero = 0;
  for (int a = 0; a <= k; ++a) nonzero += f.coeffs(a) != Complex(0.0);
  const int angular = nonzero <= 1 ? 1 : std::max(16, grid / 2);
  SupEstimate best;
  best.grid = grid;
  best.value = -1.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = double(i) / grid;
    for (int j = 0; j < angular; ++j) {
      const Point p = Point::from_moment(x, kTwoPi * j / angular);
      const double v = h.pointwise_norm(f, p);
      if (v > best.value) {
        best.value = v;
        best.argmax = p;
      }
    }
  }
  // Pattern search in (logit x, θ) from the best grid point.
  const double grid_value = best.value;
  if (!best.argmax.is_pole()) {
    double y = best.argmax.s, th = best.argmax.theta;
    double dy = 4.0 / grid * 8.0, dth = angular > 1 ? kTwoPi / angular : 0.0;
    for (int it = 0; it < 200 && (dy > 1e-10 || dth > 1e-10); ++it) {
      bool moved = false;
      const double cand[4][2] = {{y + dy, th}, {y - dy, th}, {y, th + dth}, {y, th - dth}};
      for (const auto& c : cand) {
        const double v = h.pointwise_norm(f, Point{c[0], c[1]});
        if (v > best.value) {
          best.value = v;
          best.argmax = Point{c[0], c[1]};
          y = c[0];
          th = c[1];
          moved = true;
        }
      }
      if (!moved) {
        dy *= 0.5;
        dth *= 0.5;
      }
    }
  }
  best.refinement = best.value - grid_value;
  return best;
}

PshReport psh_validate(const MetricOnL& h, int grid) {
  PshReport rep;
  rep.min_density = kInf;
  if (h.is_toric()) {
    const ToricSymbol& sym = *h.symbol();
    const double step = 60.0 / grid;
    for (int i = 1; i < grid; ++i) {
      const double s = -30.0 + i * step;
      const double d2 = sym.phi(s + step) - 2.0 * sym.phi(s) + sym.phi(s - step);
      const double slope = sym.dphi(s);
      rep.min_density = std::min(rep.min_density, d2);
      if (d2 < -1e-10 || slope < -1e-12 || slope > 1.0 + 1e-12) {
        rep.ok = false;
        rep.offending.push_back(Point{s, 0.0});
      }
    }
    return rep;
  }
  for (int i = 1; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Point p = Point::from_moment(double(i) / grid, kTwoPi * j / grid);
      const double d = h.ma_density(p);
      rep.min_density = std::min(rep.min_density, d);
      if (!(d >= -1e-8)) {
        rep.ok = false;
        rep.offending.push_back(p);
      }
    }
  return rep;
}

namespace {

double toric_sup_gap(const ToricSymbol& a, const ToricSymbol& b, int grid) {
  double best = 0.0, arg = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = double(i) / grid;
    const double v = std::abs(a.psi(x) - b.psi(x));
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  // Golden-section refinement on the neighbouring cells.
  double lo = std::max(0.0, arg - 1.0 / grid), hi = std::min(1.0, arg + 1.0 / grid);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    const double v1 = std::abs(a.psi(m1) - b.psi(m1)), v2 = std::abs(a.psi(m2) - b.psi(m2));
    best = std::max({best, v1, v2});
    if (v1 > v2) hi = m2; else lo = m1;
  }
  return best;
}

double general_sup_gap(const MetricOnL& h0, const MetricOnL& h1, int grid) {
  const int angular = std::max(8, grid / 4);
  double best = 0.0;
  Point arg;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j < (i == 0 || i == grid ? 1 : angular); ++j) {
      const Point p = Point::from_moment(double(i) / grid, kTwoPi * j / angular);
      const double v = std::abs(h0.u(p) - h1.u(p));
      if (v > best) {
        best = v;
        arg = p;
      }
    }
  if (!arg.is_pole()) {
    double dy = 0.5, dth = kTwoPi / angular;
    for (int it = 0; it < 200 && dy > 1e-9; ++it) {
      bool moved = false;
      const double cand[4][2] = {{arg.s + dy, arg.theta}, {arg.s - dy, arg.theta},
                                 {arg.s, arg.theta + dth}, {arg.s, arg.theta - dth}};
      for (const auto& c : cand) {
        const Point p{c[0], c[1]};
        const double v = std::abs(h0.u(p) - h1.u(p));
        if (v > best) {
          best = v;
          arg = p;
          moved = true;
        }
      }
      if (!moved) {
        dy *= 0.5;
        dth *= 0.5;
      }
    }
  }
  return best;
}

}  // namespace

DistanceEstimate metric_distance(const MetricOnL& h0, const MetricOnL& h1, int grid) {
  DistanceEstimate d;
  if (h0.is_toric() && h1.is_toric()) {
    d.value = 0.5 * toric_sup_gap(*h0.symbol(), *h1.symbol(), grid);
    d.grid_error = std::abs(d.value - 0.5 * toric_sup_gap(*h0.symbol(), *h1.symbol(), grid / 2));
  } else {
    d.value = 0.5 * general_sup_gap(h0, h1, grid);
    d.grid_error = std::abs(d.value - 0.5 * general_sup_gap(h0, h1, grid / 2));
  }
  return d;
}

MetricOnL toric_geodesic(const MetricOnL& h0, const MetricOnL& h1, double t) {
  if (!h0.is_toric() || !h1.is_toric()) throw Error(ErrorKind::Unsupported, "toric geodesic needs toric endpoints");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::Range, "geodesic parameter must lie in [0, 1]");
  if (t == 0.0) return h0;
  if (t == 1.0) return h1;
  return MetricOnL::toric(interpolated_symbol(h0.symbol(), h1.symbol(), t),
                          "geodesic(" + h0.name() + "," + h1.name() + ";" + std::to_string(t) + ")");
}

VolumeForm ma_volume(const MetricOnL& h) {
  VolumeForm v;
  if (h.is_toric()) {
    SymbolPtr sym = h.symbol();
    v.kind = "toric";
    v.atoms = sym->atoms();
    double atomic = 0.0;
    for (const auto& a : v.atoms) atomic += a.second;
    v.total_mass = 1.0;
    v.continuous_mass = 1.0 - atomic;
    if (sym->smooth()) v.density = [h](const Point& p) { return h.ma_density(p); };
    return v;
  }
  v.kind = "smooth";
  v.density = [h](const Point& p) { return h.ma_density(p); };
  double mass = 0.0;
  for (const QuadratureNode& q : ma_rule(h, 256, 256)) mass += q.weight;
  v.total_mass = mass;
  v.continuous_mass = mass;
  return v;
}

double toric_meridian_distance(const ToricSymbol& symbol, double s0, double s1) {
  if (s1 < s0) std::swap(s0, s1);
  const double x0 = s0 == -kInf ? 0.0 : symbol.dphi(s0);
  const double x1 = s1 == kInf ? 1.0 : symbol.dphi(s1);
  if (x1 <= x0) return 0.0;
  // x = (1 − cos τ)/2 regularizes the endpoint behaviour of s'(x).
  auto tau = [](double x) { return std::acos(1.0 - 2.0 * x); };
  std::vector<double> edges{tau(x0)};
  for (double b : symbol.breakpoints())
    if (b > x0 && b < x1) edges.push_back(tau(b));
  edges.push_back(tau(x1));
  double total = 0.0;
  std::vector<double> ts, ws;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    gauss_legendre(64, edges[i], edges[i + 1], ts, ws);
    for (int n = 0; n < 64; ++n) {
      const double x = 0.5 * (1.0 - std::cos(ts[n]));
      const double hstep = 1e-6 * std::min(x, 1.0 - x);
      const double ds = (symbol.slope_inverse(x + hstep) - symbol.slope_inverse(x - hstep)) / (2.0 * hstep);
      total += ws[n] * std::sqrt(std::max(ds, 0.0) / std::numbers::pi) * 0.5 * 0.5 * std::sin(ts[n]);
    }
  }
  return total;
}

MetricOnL make_metric(const CatalogEntry& e) {
  const auto& p = e.parameters;
  auto need = [&](std::size_t n) {
    if (p.size() < n)
      throw Error(ErrorKind::Config, "metric '" + e.name + "' of type " + e.type + " needs " + std::to_string(n) +
                                         " parameter(s)");
  };
  if (e.type == "round") return MetricOnL::round();
  if (e.type == "ramp") {
    need(1);
    return MetricOnL::toric(ramp_symbol(p[0]), e.name);
  }
  if (e.type == "mixed") {
    need(1);
    return MetricOnL::toric(mixed_symbol(p[0]), e.name);
  }
  if (e.type == "max-affine") {
    if (p.size() < 4 || p.size() % 2) throw Error(ErrorKind::Config, "max-affine needs slope/intercept pairs");
    std::vector<double> m, c;
    for (std::size_t i = 0; i < p.size(); i += 2) {
      m.push_back(p[i]);
      c.push_back(p[i + 1]);
    }
    return MetricOnL::toric(piecewise_affine_symbol(m, c), e.name);
  }
  if (e.type == "fs-diagonal") {
    need(2);
    const int k = static_cast<int>(p[0]);
    if (static_cast<int>(p.size()) != k + 2) throw Error(ErrorKind::Config, "fs-diagonal needs k and k+1 entries");
    RVector g(k + 1);
    for (int a = 0; a <= k; ++a) g(a) = p[a + 1];
    return MetricOnL::toric(fs_diagonal_symbol(g, k), e.name);
  }
  if (e.type == "dipole") {
    need(1);
    const double eps = p[0];
    if (!(std::abs(eps) < 0.5)) throw Error(ErrorKind::Config, "dipole amplitude must satisfy |eps| < 1/2");
    return MetricOnL::smooth(
        [eps](const Point& q) {
          if (q.is_pole()) return 0.0;
          return eps * 2.0 * std::exp(0.5 * (q.log_moment() + q.log_co_moment())) * std::cos(q.theta);
        },
        e.name);
  }
  throw Error(ErrorKind::Config, "unknown metric type '" + e.type + "'");
}

}  // namespace srm
