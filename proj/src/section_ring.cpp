#include "srm/section_ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include "srm/random.hpp"

namespace srm {

SectionVector multiply(const SectionVector& f, const SectionVector& g) {
  const int k = f.degree, l = g.degree;
  CVector c = CVector::Zero(k + l + 1);
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= l; ++b) c(a + b) += f.coeffs(a) * g.coeffs(b);
  return {k + l, c};
}

MultMap::MultMap(std::vector<int> d) : degrees(std::move(d)) {
  if (degrees.empty()) throw Error(ErrorKind::Range, "multiplication map needs at least one factor");
  Index cols = 1;
  for (int k : degrees) {
    if (k < 0) throw Error(ErrorKind::Range, "negative degree");
    cols *= k + 1;
  }
  const int total = target_degree();
  matrix = CMatrix::Zero(total + 1, cols);
  std::vector<int> idx(degrees.size(), 0);
  for (Index col = 0; col < cols; ++col) {
    matrix(std::accumulate(idx.begin(), idx.end(), 0), col) = 1.0;
    for (int f = static_cast<int>(degrees.size()) - 1; f >= 0; --f) {
      if (++idx[f] <= degrees[f]) break;
      idx[f] = 0;
    }
  }
}

int MultMap::target_degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }

HermitianNorm quotient_tensor_norm(const HermitianNorm& nk, const HermitianNorm& nl, int k, int l) {
  if (nk.dim() != k + 1 || nl.dim() != l + 1)
    throw Error(ErrorKind::DimensionMismatch, "norm dimensions do not match degrees " + std::to_string(k) + ", " +
                                                  std::to_string(l));
  for (const auto* n : {&nk, &nl})
    if (n->basis().name == "monomial" && n->basis().degree != n->dim() - 1)
      throw Error(ErrorKind::DimensionMismatch, "basis label " + n->basis().str() + " does not match dimension");
  const CMatrix ak = nk.inverse_gram();
  const CMatrix al = nl.inverse_gram();
  const int m = k + l;
  CMatrix s = CMatrix::Zero(m + 1, m + 1);
  for (int c = 0; c <= m; ++c)
    for (int cp = 0; cp <= m; ++cp) {
      Complex acc = 0.0;
      for (int a = std::max(0, c - l); a <= std::min(k, c); ++a)
        for (int ap = std::max(0, cp - l); ap <= std::min(k, cp); ++ap) acc += ak(a, ap) * al(c - a, cp - ap);
      s(c, cp) = acc;
    }
  const HermitianNorm inner(0.5 * (s + s.adjoint()), monomial_basis(m));
  return HermitianNorm(inner.inverse_gram(), monomial_basis(m));
}

HermitianNorm quotient_tensor_norm(const std::vector<HermitianNorm>& norms, const std::vector<int>& degrees) {
  if (norms.empty() || norms.size() != degrees.size())
    throw Error(ErrorKind::DimensionMismatch, "one norm per degree required");
  HermitianNorm acc = norms.front();
  int deg = degrees.front();
  for (std::size_t i = 1; i < norms.size(); ++i) {
    acc = quotient_tensor_norm(acc, norms[i], deg, degrees[i]);
    deg += degrees[i];
  }
  return acc;
}

const HermitianNorm& HilbertFamily::operator()(int k) {
  auto it = cache_.find(k);
  if (it == cache_.end()) it = cache_.emplace(k, quadrature_gram(k, h_, scheme_)).first;
  return it->second;
}

IsometryRatio asym_isometry_ratio(int k, int l, HilbertFamily& hilb, int n) {
  IsometryRatio r;
  r.k = k;
  r.l = l;
  const HermitianNorm q = quotient_tensor_norm(hilb(k), hilb(l), k, l);
  const HermitianNorm& target = hilb(k + l);
  r.gi_distance = goldman_iwahori(q, target);
  const double factor = std::pow(double(k) * l / (k + l), 0.5 * n);
  r.scaled_gi_distance = goldman_iwahori(q.scaled(factor), target);
  return r;
}

CMatrix multiplicative_defect(int k, int l, HilbertFamily& hilb) {
  const HermitianNorm q = quotient_tensor_norm(hilb(k), hilb(l), k, l);
  // Q = (M G⊗⁻¹ M^H)⁻¹, so A = Q⁻¹ G_{k+l}.
  return q.solve(hilb(k + l).gram());
}

double defect_deviation(const CMatrix& a, const HermitianNorm& target, double c) {
  // L^H (A − c) L^{-H} is Hermitian when G A is.
  const CMatrix l = target.cholesky_factor();
  const CMatrix shifted = a - c * CMatrix::Identity(a.rows(), a.cols());
  const CMatrix m = l.adjoint() * target.whiten(shifted.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

TensorElement optimal_decomposition(const SectionVector& f, const HermitianNorm& nk, const HermitianNorm& nl, int k,
                                    int l) {
  if (f.degree != k + l) throw Error(ErrorKind::DimensionMismatch, "section degree must equal k + l");
  const HermitianNorm q = quotient_tensor_norm(nk, nl, k, l);
  const CVector y = q.gram() * f.coeffs;
  CMatrix ymat(k + 1, l + 1);
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= l; ++b) ymat(a, b) = y(a + b);
  // (A ⊗ B) vec_r(X) = vec_r(A X B^T)
  const CMatrix left = nk.solve(ymat);
  const CMatrix dec = nl.solve(left.transpose()).transpose();
  TensorElement t = TensorElement::from_matrix(dec);
  t.labels = {monomial_basis(k), monomial_basis(l)};
  return t;
}

TensorElement optimal_decomposition(const SectionVector& f, int k, int l, HilbertFamily& hilb) {
  return optimal_decomposition(f, hilb(k), hilb(l), k, l);
}

// ---------------------------------------------------------------------------
// L¹ / L∞ branch

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Weighted monomial values e_a(p) = e^{iaθ} |z^a|_{h^k}(p) at a list of points.
CMatrix monomial_values(const MetricOnL& h, int k, const std::vector<Point>& pts, const std::vector<double>* us) {
  CMatrix e(static_cast<Index>(pts.size()), k + 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double u = us ? (*us)[i] : h.u(pts[i]);
    for (int a = 0; a <= k; ++a)
      e(static_cast<Index>(i), a) = std::polar(std::exp(0.5 * log_fs_monomial_sq(k, a, pts[i]) - 0.5 * k * u),
                                               a * pts[i].theta);
  }
  return e;
}

struct FactorRule {
  CMatrix values;  // nodes × (k+1)
  RVector weights;
};

FactorRule factor_rule(const MetricOnL& h, int k, int radial, int angular) {
  const std::vector<QuadratureNode> nodes = ma_rule(h, radial, angular);
  std::vector<Point> pts;
  std::vector<double> us;
  FactorRule r;
  r.weights.resize(static_cast<Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    pts.push_back(nodes[i].p);
    us.push_back(nodes[i].u);
    r.weights(static_cast<Index>(i)) = nodes[i].weight;
  }
  r.values = monomial_values(h, k, pts, &us);
  return r;
}

// min over c of ‖F0 + Σ c_m K_m‖_{L¹(X×X)} by iteratively reweighted least squares.
double fiber_l1_min(const FactorRule& r1, const FactorRule& r2, const CMatrix& f0, const std::vector<CMatrix>& kernel) {
  const Index n1 = r1.values.rows(), n2 = r2.values.rows();
  const Index rows = n1 * n2;
  auto flatten = [&](const CMatrix& t) {
    const CMatrix v = r1.values * t * r2.values.transpose();
    return CVector(Eigen::Map<const CVector>(v.data(), rows));
  };
  RVector w(rows);
  for (Index j = 0; j < n2; ++j)
    for (Index i = 0; i < n1; ++i) w(j * n1 + i) = r1.weights(i) * r2.weights(j);
  const CVector b = flatten(f0);
  double best = (w.array() * b.array().abs()).sum();
  if (kernel.empty()) return best;
  CMatrix a(rows, static_cast<Index>(kernel.size()));
  for (std::size_t m = 0; m < kernel.size(); ++m) a.col(static_cast<Index>(m)) = flatten(kernel[m]);
  CVector c = CVector::Zero(a.cols());
  CVector r = b;
  for (int it = 0; it < 60; ++it) {
    const double mean = (w.array() * r.array().abs()).sum() / w.sum();
    const double delta = std::max(1e-14, 1e-6 * mean);
    const RVector omega = (w.array() / r.array().abs().max(delta)).matrix();
    const CMatrix aw = omega.cwiseSqrt().asDiagonal() * a;
    const CVector bw = omega.cwiseSqrt().asDiagonal() * b;
    c = -(aw.adjoint() * aw).ldlt().solve(aw.adjoint() * bw);
    r = b + a * c;
    const double obj = (w.array() * r.array().abs()).sum();
    const bool stalled = std::abs(best - obj) < 1e-10 * best;
    best = std::min(best, obj);
    if (stalled) break;
  }
  return best;
}

// 4-D sup of |T(x, y)| over a grid on X × X, refined by pattern search.
double sup_on_product(const MetricOnL& h, int k, int l, const CMatrix& t, int grid) {
  std::vector<Point> pts;
  for (int i = 0; i <= grid; ++i) {
    const double x = double(i) / grid;
    const int na = (i == 0 || i == grid) ? 1 : grid;
    for (int j = 0; j < na; ++j) pts.push_back(Point::from_moment(x, kTwoPi * j / na));
  }
  const CMatrix e1 = monomial_values(h, k, pts, nullptr);
  const CMatrix e2 = monomial_values(h, l, pts, nullptr);
  const CMatrix v = e1 * t * e2.transpose();
  Index bi = 0, bj = 0;
  double best = v.cwiseAbs().maxCoeff(&bi, &bj);
  auto value = [&](const Point& p, const Point& q) {
    const CMatrix a = monomial_values(h, k, {p}, nullptr);
    const CMatrix b = monomial_values(h, l, {q}, nullptr);
    return std::abs((a * t * b.transpose())(0, 0));
  };
  Point p = pts[static_cast<std::size_t>(bi)], q = pts[static_cast<std::size_t>(bj)];
  if (!p.is_pole() && !q.is_pole()) {
    double ds = 0.5, dt = kTwoPi / grid;
    for (int it = 0; it < 300 && ds > 1e-9; ++it) {
      bool moved = false;
      const Point cand[8][2] = {{{p.s + ds, p.theta}, q}, {{p.s - ds, p.theta}, q}, {{p.s, p.theta + dt}, q},
                                {{p.s, p.theta - dt}, q}, {p, {q.s + ds, q.theta}}, {p, {q.s - ds, q.theta}},
                                {p, {q.s, q.theta + dt}}, {p, {q.s, q.theta - dt}}};
      for (const auto& c : cand) {
        const double val = value(c[0], c[1]);
        if (val > best) {
          best = val;
          p = c[0];
          q = c[1];
          moved = true;
        }
      }
      if (!moved) {
        ds *= 0.5;
        dt *= 0.5;
      }
    }
  }
  return best;
}

double r_l1_monomial(const FactorRule& r, int a) { return r.weights.dot(r.values.col(a).cwiseAbs()); }

SectionVector random_section(int k, const HermitianNorm& g, Rng& rng) {
  // Gaussian in an orthonormal basis: coefficients L^{-H} ξ.
  const CVector xi = random_cvector(k + 1, rng);
  const CMatrix l = g.cholesky_factor();
  CVector c = l.adjoint().triangularView<Eigen::Upper>().solve(xi);
  return {k, c};
}

SectionVector peak_section(int k, const MetricOnL& h, const HermitianNorm& g, const Point& p) {
  const CMatrix e = monomial_values(h, k, {p}, nullptr);
  return {k, g.solve(CVector(e.row(0).adjoint()))};
}

}  // namespace

BanachIsometryRatio l1_linf_isometry_ratio(int k, int l, HilbertFamily& hilb, const BanachProbeOptions& opt, int n) {
  const MetricOnL& h = hilb.metric();
  if (!h.is_toric()) throw Error(ErrorKind::Unsupported, "L1/Linf isometry scan needs a toric or round metric");
  const int m = k + l;
  BanachIsometryRatio r;
  r.k = k;
  r.l = l;
  r.l1_lower = std::numeric_limits<double>::infinity();
  const double norm_factor = std::pow(double(k) * l / m, n) / std::pow(2.0, n);
  Rng rng = make_stream(opt.seed, static_cast<std::uint64_t>(k * 1000 + l));

  std::vector<SectionVector> probes;
  for (int c = 0; c <= m; ++c) probes.push_back(SectionVector::monomial(m, c));
  for (int i = 0; i < opt.random_probes; ++i) probes.push_back(random_section(m, hilb(m), rng));
  std::uniform_real_distribution<double> unif(0.05, 0.95), ang(0.0, kTwoPi);
  for (int i = 0; i < opt.peak_probes; ++i)
    probes.push_back(peak_section(m, h, hilb(m), Point::from_moment(unif(rng), ang(rng))));
  r.probes = static_cast<int>(probes.size());

  // Fixed L¹ rules per degree: adaptive quadrature per candidate is far too slow here.
  const int l1_angular = 4 * m + 16;
  const FactorRule rule_k = factor_rule(h, k, 64, l1_angular);
  const FactorRule rule_l = factor_rule(h, l, 64, l1_angular);
  const FactorRule rule_m = factor_rule(h, m, 64, l1_angular);
  auto l1 = [](const FactorRule& r, const CVector& c) { return r.weights.dot((r.values * c).cwiseAbs()); };
  RVector l1k(k + 1), l1l(l + 1);
  for (int a = 0; a <= k; ++a) l1k(a) = r_l1_monomial(rule_k, a);
  for (int b = 0; b <= l; ++b) l1l(b) = r_l1_monomial(rule_l, b);
  const FactorRule rk_full = factor_rule(h, k, opt.l1_radial, 2 * std::max(k, l) + 4);
  const FactorRule rl_full = factor_rule(h, l, opt.l1_radial, 2 * std::max(k, l) + 4);
  const FactorRule rl_radial = factor_rule(h, l, opt.l1_radial, 1);

  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const SectionVector& f = probes[pi];
    const CMatrix dec = optimal_decomposition(f, hilb(k), hilb(l), k, l).as_matrix();

    // L∞: Ban∞(f) ≤ [Ban∞ ⊗_ε Ban∞](f) ≤ sup_{X×X} |Dec f|.
    const double sup_f = linf_norm(f, h, 256).value;
    const double sup_dec = sup_on_product(h, k, l, dec, opt.sup_grid);
    r.linf_upper = std::max(r.linf_upper, sup_dec / sup_f);

    // L¹ upper bound: best of the monomial expansion and the Hilbert SVD.
    const double ban1 = l1(rule_m, f.coeffs);
    double upper = 0.0;
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= l; ++b) upper += std::abs(dec(a, b)) * l1k(a) * l1l(b);
    {
      const CMatrix lk = hilb(k).cholesky_factor(), ll = hilb(l).cholesky_factor();
      Eigen::JacobiSVD<CMatrix> svd(lk.adjoint() * dec * ll.conjugate(), Eigen::ComputeThinU | Eigen::ComputeThinV);
      double by_svd = 0.0;
      for (Index j = 0; j < svd.singularValues().size(); ++j) {
        const CVector x = lk.adjoint().triangularView<Eigen::Upper>().solve(CVector(svd.matrixU().col(j)));
        const CVector y = ll.adjoint().triangularView<Eigen::Upper>().solve(CVector(svd.matrixV().col(j).conjugate()));
        by_svd += svd.singularValues()(j) * l1(rule_k, x) * l1(rule_l, y);
      }
      upper = std::min(upper, by_svd);
    }
    r.l1_upper = std::max(r.l1_upper, upper / ban1 * norm_factor);

    // L¹ lower bound: π ≥ L¹(X × X) restricted to the fiber over f.
    const bool monomial = pi <= static_cast<std::size_t>(m);
    double lower = -1.0;
    if (monomial) {
      const int c = static_cast<int>(pi);
      std::vector<int> support;
      for (int a = std::max(0, c - l); a <= std::min(k, c); ++a) support.push_back(a);
      std::vector<CMatrix> kernel;
      for (std::size_t j = 1; j < support.size(); ++j) {
        CMatrix kmat = CMatrix::Zero(k + 1, l + 1);
        kmat(support[j], c - support[j]) = 1.0;
        kmat(support[0], c - support[0]) = -1.0;
        kernel.push_back(kmat);
      }
      // |F(x, y)| depends on θ₁ − θ₂ only, so the second factor needs one angle.
      lower = fiber_l1_min(rk_full, rl_radial, dec, kernel);
    } else if (opt.l1_full_fiber && k * l <= 36) {
      std::vector<CMatrix> kernel;
      for (int a = 0; a <= k; ++a)
        for (int b = 1; b <= l; ++b)
          if (a + 1 <= k) {
            CMatrix kmat = CMatrix::Zero(k + 1, l + 1);
            kmat(a, b) = 1.0;
            kmat(a + 1, b - 1) = -1.0;
            kernel.push_back(kmat);
          }
      lower = fiber_l1_min(rk_full, rl_full, dec, kernel);
    }
    if (lower >= 0.0) r.l1_lower = std::min(r.l1_lower, lower / ban1 * norm_factor);
  }

  for (int i = 0; i < opt.pair_samples; ++i) {
    const SectionVector f = random_section(k, hilb(k), rng);
    const SectionVector g = random_section(l, hilb(l), rng);
    const double ratio = linf_norm(multiply(f, g), h, 256).value / (linf_norm(f, h, 256).value * linf_norm(g, h, 256).value);
    r.mult_ratio_max = std::max(r.mult_ratio_max, ratio);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Graded norms

const HermitianNorm& GradedNorm::at(int k) const {
  auto it = pieces.find(k);
  if (it == pieces.end()) throw Error(ErrorKind::Range, "graded norm has no degree " + std::to_string(k));
  return it->second;
}

GradedNorm hilbert_graded_norm(HilbertFamily& hilb, int kmax, int kmin) {
  GradedNorm n;
  n.provenance = "hilbert(" + hilb.metric().name() + ")";
  n.budget = [](int k) { return mult_gen_budget(k); };
  for (int k = kmin; k <= kmax; ++k) n.pieces.emplace(k, hilb(k));
  return n;
}

double mult_gen_budget(int k, int n) { return 0.5 * n * std::log(double(k)) + 2.0 + std::log(double(k + 1)); }

MultGenReport check_mult_generated(const GradedNorm& n, int p0, int kmax, const std::vector<int>& r_set,
                                   int random_samples, std::uint64_t seed) {
  if (!n.budget) throw Error(ErrorKind::Precondition, "graded norm has no budget function");
  MultGenReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  std::map<std::vector<int>, HermitianNorm> memo;
  std::function<const HermitianNorm&(const std::vector<int>&)> tower = [&](const std::vector<int>& parts)
      -> const HermitianNorm& {
    auto it = memo.find(parts);
    if (it != memo.end()) return it->second;
    if (parts.size() == 1) return memo.emplace(parts, n.at(parts[0])).first->second;
    const std::vector<int> head(parts.begin(), parts.end() - 1);
    const int hd = std::accumulate(head.begin(), head.end(), 0);
    HermitianNorm q = quotient_tensor_norm(tower(head), n.at(parts.back()), hd, parts.back());
    return memo.emplace(parts, std::move(q)).first->second;
  };
  auto check = [&](std::vector<int> parts) {
    std::sort(parts.begin(), parts.end());
    const int k = std::accumulate(parts.begin(), parts.end(), 0);
    const HermitianNorm& q = tower(parts);
    const HermitianNorm& nk = n.at(k);
    const double d = goldman_iwahori(q, nk);
    double budget = n.budget(k);
    for (int p : parts) budget += n.budget(p);
    ++rep.checked;
    rep.max_excess = std::max(rep.max_excess, d - budget);
    if (d > budget) rep.violations.push_back({parts, k, d, budget});
    const RVector ev = relative_spectrum(q, nk);
    if (0.5 * std::log(ev.maxCoeff()) > budget) ++rep.one_sided_violations;
  };
  auto allowed = [&](int r) { return std::find(r_set.begin(), r_set.end(), r) != r_set.end(); };
  if (allowed(2))
    for (int a = p0; 2 * a <= kmax; ++a)
      for (int b = a; a + b <= kmax; ++b) check({a, b});
  if (allowed(3))
    for (int a = p0; 3 * a <= kmax; ++a)
      for (int b = a; a + 2 * b <= kmax; ++b)
        for (int c = b; a + b + c <= kmax; ++c) check({a, b, c});
  std::vector<int> big;
  for (int r : r_set)
    if (r >= 4 && r * p0 <= kmax) big.push_back(r);
  if (!big.empty()) {
    Rng rng = make_stream(seed, 0x6d67);
    for (int s = 0; s < random_samples; ++s) {
      const int r = big[static_cast<std::size_t>(rng() % big.size())];
      const int k = r * p0 + static_cast<int>(rng() % static_cast<std::uint64_t>(kmax - r * p0 + 1));
      std::vector<int> parts(static_cast<std::size_t>(r), p0);
      for (int extra = k - r * p0; extra > 0; --extra) ++parts[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(r))];
      check(parts);
    }
  }
  return rep;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Range, "line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {my - slope * mx, slope};
}

GradedDistance graded_equivalence_distance(const GradedNorm& a, const GradedNorm& b, const std::vector<int>& degrees) {
  GradedDistance g;
  std::vector<double> inv;
  for (int k : degrees) {
    if (k < 1) throw Error(ErrorKind::Range, "degrees must be positive");
    g.degrees.push_back(k);
    g.scaled.push_back(goldman_iwahori(a.at(k), b.at(k)) / k);
    inv.push_back(1.0 / k);
  }
  if (g.scaled.empty()) return g;
  g.last = g.scaled.back();
  for (std::size_t i = g.scaled.size() / 2; i < g.scaled.size(); ++i) g.tail_max = std::max(g.tail_max, g.scaled[i]);
  if (g.scaled.size() >= 2) {
    const auto [c0, c1] = fit_line(inv, g.scaled);
    g.limit = c0;
    g.slope = c1;
  } else {
    g.limit = g.last;
  }
  return g;
}

}  // namespace srm
