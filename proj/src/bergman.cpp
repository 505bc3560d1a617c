#include "srm/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<QuadratureNode> kernel_rule(const BergmanEvaluator& ev, int extra = 0) {
  const int k = ev.degree();
  const int radial = ev.metric().is_toric() ? std::max(64, 2 * k + 16) + extra : std::max(128, 2 * k + 16) + extra;
  return ma_rule(ev.metric(), radial, 2 * k + 2 + extra);
}

}  // namespace

BergmanEvaluator::BergmanEvaluator(int k, MetricOnL h, const QuadratureScheme& scheme)
    : k_(k), h_(std::move(h)), gram_(quadrature_gram(k, h_, scheme)) {}

BergmanEvaluator::BergmanEvaluator(int k, MetricOnL h, HermitianNorm gram)
    : k_(k), h_(std::move(h)), gram_(std::move(gram)) {
  if (gram_.dim() != k + 1) throw Error(ErrorKind::DimensionMismatch, "gram dimension must be k + 1");
}

CVector BergmanEvaluator::weighted_values(const Point& p) const {
  CVector e(k_ + 1);
  const double u = h_.u(p);
  for (int a = 0; a <= k_; ++a)
    e(a) = std::polar(std::exp(0.5 * log_fs_monomial_sq(k_, a, p) - 0.5 * k_ * u), a * p.theta);
  return e;
}

CVector BergmanEvaluator::orthonormal_values(const Point& p) const {
  // s_i(p) = Σ_a e_a(p) (L⁻ᴴ)_{ai} = conj((L⁻¹ conj e)_i)
  return gram_.whiten(weighted_values(p).conjugate()).conjugate();
}

Complex BergmanEvaluator::kernel(const Point& x, const Point& y) const {
  const CVector ex = gram_.whiten(weighted_values(x).conjugate());
  const CVector ey = gram_.whiten(weighted_values(y).conjugate());
  return ex.dot(ey);
}

double BergmanEvaluator::diagonal(const Point& x) const {
  return gram_.whiten(weighted_values(x).conjugate()).squaredNorm();
}

double reproducing_residual(const BergmanEvaluator& ev, const SectionVector& f, const std::vector<Point>& points) {
  if (f.degree != ev.degree()) throw Error(ErrorKind::DimensionMismatch, "section degree differs from kernel degree");
  const int k = ev.degree();
  CMatrix m = CMatrix::Zero(k + 1, k + 1);
  for (const QuadratureNode& q : kernel_rule(ev)) {
    const CVector e = ev.weighted_values(q.p);
    m.noalias() += q.weight * e.conjugate() * e.transpose();
  }
  // ∫ B(x, y) f(y) dv(y) = e(x)^T G⁻¹ (∫ conj(e) e^T dv) c
  const CVector projected = ev.gram().solve(m * f.coeffs);
  double worst = 0.0, scale = 0.0;
  for (const Point& p : points) {
    const CVector e = ev.weighted_values(p);
    const Complex direct = e.transpose() * f.coeffs;
    const Complex repro = e.transpose() * projected;
    worst = std::max(worst, std::abs(repro - direct));
    scale = std::max(scale, std::abs(direct));
  }
  return scale > 0.0 ? worst / scale : worst;
}

double kernel_trace(const BergmanEvaluator& ev) {
  double acc = 0.0;
  for (const QuadratureNode& q : kernel_rule(ev)) acc += q.weight * ev.diagonal(q.p);
  return acc;
}

DecayFit off_diagonal_decay_scan(const MetricOnL& h, const std::vector<int>& degrees, double x0_moment, int targets) {
  if (!h.is_toric()) throw Error(ErrorKind::Unsupported, "decay scan measures meridian distances of toric metrics");
  DecayFit fit;
  const ToricSymbol& sym = *h.symbol();
  const Point x0 = Point::from_moment(x0_moment, 0.0);
  std::vector<Point> ys;
  std::vector<double> dists;
  for (int j = 0; j <= targets; ++j) {
    const Point y = Point::from_moment(double(j) / targets, 0.0);
    const double d = toric_meridian_distance(sym, std::min(x0.s, y.s), std::max(x0.s, y.s));
    if (d <= 0.0) continue;
    ys.push_back(y);
    dists.push_back(d);
  }
  fit.log_c_envelope = -kInf;
  std::vector<BergmanEvaluator> evs;
  for (int k : degrees) {
    if (k < 1) throw Error(ErrorKind::Range, "decay scan needs k ≥ 1");
    evs.emplace_back(k, h);
    fit.log_c_envelope = std::max(fit.log_c_envelope, std::log(evs.back().diagonal(x0) / k) + 1.0);
  }
  fit.fitted_c = kInf;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const int k = degrees[i];
    double rate = kInf;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double lk = std::log(evs[i].kernel_norm(x0, ys[j]) / k);
      fit.rows.push_back({k, dists[j], lk});
      if (std::isfinite(lk)) rate = std::min(rate, (fit.log_c_envelope - lk) / (std::sqrt(double(k)) * dists[j]));
    }
    fit.degrees.push_back(k);
    fit.rate.push_back(rate);
    fit.fitted_c = std::min(fit.fitted_c, rate);
  }
  fit.doubling_ratio = 1.0;
  for (std::size_t i = 0; i < degrees.size(); ++i)
    for (std::size_t j = 0; j < degrees.size(); ++j)
      if (degrees[j] == 2 * degrees[i]) {
        const double r = fit.rate[j] / fit.rate[i];
        fit.doubling_ratio = std::max(fit.doubling_ratio, std::max(r, 1.0 / r));
      }
  return fit;
}

Complex model_kernel(Complex z, Complex zp) {
  return std::exp(-0.5 * std::numbers::pi * (std::norm(z) + std::norm(zp) - 2.0 * z * std::conj(zp)));
}

NormalChart NormalChart::at(const MetricOnL& h, const Point& x0) {
  NormalChart c;
  c.x0 = x0;
  c.antipodal = x0.s > 0.0;
  if (!c.antipodal) c.center = x0.z();
  else c.center = x0.s == kInf ? Complex(0.0) : 1.0 / x0.z();
  // Potential density in the chart, up to a constant factor.
  auto chart_point = [&](Complex w) {
    if (!c.antipodal) return Point::from_z(w);
    return w == Complex(0.0) ? Point{kInf, 0.0} : Point::from_z(1.0 / w);
  };
  auto density = [&](Complex w) {
    double d = 1.0;
    if (h.kind() != MetricKind::RoundFS) {
      Point probe = chart_point(w);
      // The toric density is read off the symbol, which is singular at the poles.
      if (h.is_toric() && probe.is_pole()) probe.s = std::copysign(30.0, probe.s);
      d = h.ma_density(probe);
    }
    return d / std::pow(1.0 + std::norm(w), 2);
  };
  const double rho = density(c.center);
  c.scale = std::sqrt(rho / std::numbers::pi);
  if (!x0.is_pole()) {
    const double step = 1e-4 * (1.0 + std::abs(c.center));
    const double dx = (density(c.center + step) - density(c.center - step)) / (2 * step);
    const double dy = (density(c.center + Complex(0, step)) - density(c.center - Complex(0, step))) / (2 * step);
    c.quadratic = 0.5 * Complex(dx, -dy) / (2.0 * rho * c.scale);
  }
  return c;
}

Point NormalChart::point(Complex z) const {
  Complex v = z;
  for (int i = 0; i < 8; ++i) v = z - quadratic * v * v;
  const Complex w = center + v / scale;
  if (!antipodal) return Point::from_z(w);
  if (w == Complex(0.0)) return {kInf, 0.0};
  return Point::from_z(1.0 / w);
}

double near_diagonal_residual(const BergmanEvaluator& ev, const NormalChart& chart, Complex z, Complex zp, double eps) {
  if (std::abs(z) > eps || std::abs(zp) > eps)
    throw Error(ErrorKind::Range, "normal coordinates beyond radius " + std::to_string(eps));
  const double k = ev.degree();
  const double b = ev.kernel_norm(chart.point(z), chart.point(zp)) / k;
  const double root = std::sqrt(k);
  return std::abs(b - std::abs(model_kernel(root * z, root * zp)));
}

ProjectorBound projector_lp_bound(const BergmanEvaluator& ev, const std::vector<Point>& probes) {
  const int k = ev.degree();
  const int radial = std::max(96, 3 * k + 32);
  const int angular = std::max(96, 4 * k + 32);
  const std::vector<QuadratureNode> rule = ma_rule(ev.metric(), radial, angular);
  CMatrix vals(static_cast<Index>(rule.size()), k + 1);
  RVector w(static_cast<Index>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    vals.row(static_cast<Index>(i)) = ev.gram().whiten(ev.weighted_values(rule[i].p).conjugate()).transpose();
    w(static_cast<Index>(i)) = rule[i].weight;
  }
  ProjectorBound best;
  best.value = -1.0;
  for (const Point& x0 : probes) {
    const CVector e0 = ev.gram().whiten(ev.weighted_values(x0).conjugate());
    const double row = w.dot((vals.conjugate() * e0).cwiseAbs());
    if (row > best.value) {
      best.value = row;
      best.argmax = x0;
    }
  }
  return best;
}

ProjectorBound projector_lp_bound(const BergmanEvaluator& ev, int probe_count) {
  std::vector<Point> probes;
  const int angles = ev.metric().is_toric() ? 1 : 4;
  for (int i = 0; i < probe_count; ++i)
    for (int j = 0; j < angles; ++j)
      probes.push_back(Point::from_moment(double(i) / std::max(1, probe_count - 1), kTwoPi * j / angles));
  return projector_lp_bound(ev, probes);
}

BernsteinMarkov bernstein_markov_ratio(const BergmanEvaluator& ev, int grid) {
  const bool toric = ev.metric().is_toric();
  const int angles = toric ? 1 : std::max(8, grid / 4);
  BernsteinMarkov out;
  double best = -1.0;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j < angles; ++j) {
      const Point p = Point::from_moment(double(i) / grid, kTwoPi * j / angles);
      const double d = ev.diagonal(p);
      if (d > best) {
        best = d;
        out.argmax = p;
      }
    }
  if (!out.argmax.is_pole()) {
    double ds = 0.25, dt = toric ? 0.0 : kTwoPi / angles;
    for (int it = 0; it < 200 && ds > 1e-10; ++it) {
      bool moved = false;
      const Point p = out.argmax;
      for (const Point c : {Point{p.s + ds, p.theta}, Point{p.s - ds, p.theta}, Point{p.s, p.theta + dt},
                            Point{p.s, p.theta - dt}}) {
        const double d = ev.diagonal(c);
        if (d > best) {
          best = d;
          out.argmax = c;
          moved = true;
        }
      }
      if (!moved) {
        ds *= 0.5;
        dt *= 0.5;
      }
    }
  }
  out.rho = std::sqrt(best);
  out.log_rate = std::log(out.rho) / std::max(1, ev.degree());
  return out;
}

}  // namespace srm
