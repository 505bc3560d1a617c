#include "srm/fubini_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "srm/section_ring.hpp"

namespace srm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CVector fs_values(int k, const Point& p) {
  CVector e(k + 1);
  for (int a = 0; a <= k; ++a) e(a) = std::polar(std::exp(0.5 * log_fs_monomial_sq(k, a, p)), a * p.theta);
  return e;
}

bool is_diagonal(const HermitianNorm& n) {
  const CMatrix& g = n.gram();
  const double scale = g.diagonal().cwiseAbs().maxCoeff();
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < g.cols(); ++j)
      if (i != j && std::abs(g(i, j)) > 1e-14 * scale) return false;
  return true;
}

Point point_from_homogeneous(Complex a, Complex b) {
  if (b == Complex(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return Point::from_z(a / b);
}

}  // namespace

double FSMetric::relative_weight(const Point& p) const {
  return std::log(source.whiten(fs_values(k, p).conjugate()).squaredNorm());
}

FSMetric fs_metric(const HermitianNorm& n, int k) {
  if (k < 1) throw Error(ErrorKind::Range, "FS operator needs k ≥ 1");
  if (n.dim() != k + 1) throw Error(ErrorKind::DimensionMismatch, "norm dimension must be k + 1");
  return {k, n};
}

MetricOnL fs_root(const HermitianNorm& n, int k) {
  const FSMetric fs = fs_metric(n, k);
  if (is_diagonal(n)) return MetricOnL::toric(fs_diagonal_symbol(n.gram().diagonal().real(), k), "fs-root");
  return MetricOnL::smooth([fs](const Point& p) { return fs.relative_weight(p) / fs.k; }, "fs-root");
}

std::vector<TianRow> tian_convergence_scan(const MetricOnL& h, const std::vector<int>& degrees,
                                           const QuadratureScheme& scheme) {
  std::vector<TianRow> rows;
  for (int k : degrees) {
    const MetricOnL root = fs_root(quadrature_gram(k, h, scheme), k);
    rows.push_back({k, metric_distance(root, h).value});
  }
  return rows;
}

std::vector<Point> fs_grid(int grid) {
  std::vector<Point> pts{Point::from_moment(0.0), Point::from_moment(1.0)};
  for (int i = 1; i < grid; ++i)
    for (int j = 0; j < grid; ++j) pts.push_back(Point::from_moment(double(i) / grid, kTwoPi * j / grid));
  return pts;
}

double segre_identity_check(const HermitianNorm& nk, const HermitianNorm& nl, int k, int l, int grid) {
  const FSMetric a = fs_metric(nk, k), b = fs_metric(nl, l);
  const FSMetric q = fs_metric(quotient_tensor_norm(nk, nl, k, l), k + l);
  double worst = 0.0;
  for (const Point& p : fs_grid(grid))
    worst = std::max(worst, std::abs(a.relative_weight(p) + b.relative_weight(p) - q.relative_weight(p)));
  return worst;
}

MonotonicityReport fs_monotonicity_check(const HermitianNorm& n, const HermitianNorm& np, double c, int k, int grid) {
  if (!(c > 0.0)) throw Error(ErrorKind::Range, "comparison constant must be positive");
  // ‖v‖²_N ≤ c^{2k} ‖v‖²_{N'}
  const double lmax = relative_spectrum(np, n).maxCoeff();
  const double bound = 2.0 * k * std::log(c);
  if (std::log(lmax) > bound + 1e-12)
    throw Error(ErrorKind::Precondition, "N ≤ c^k N' fails: log λ_max = " + std::to_string(std::log(lmax)));
  const FSMetric a = fs_metric(n, k), b = fs_metric(np, k);
  MonotonicityReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (const Point& p : fs_grid(grid)) {
    const double gap = a.relative_weight(p) - b.relative_weight(p) + bound;
    rep.min_gap = std::min(rep.min_gap, gap);
  }
  rep.holds = rep.min_gap >= -1e-10;
  return rep;
}

HermitianNorm counterexample_norm(int k) {
  if (k < 2 || k % 2 != 0) throw Error(ErrorKind::Range, "counterexample norm needs an even degree k ≥ 2");
  RVector d(k + 1);
  for (int a = 0; a <= k; ++a)
    d(a) = std::abs(2 * a - k) <= 1 ? 1.0
                                    : std::exp(std::lgamma(a + 1.0) + std::lgamma(k - a + 1.0) - std::lgamma(k + 2.0));
  return HermitianNorm::diagonal(d, monomial_basis(k));
}

std::uint64_t counterexample_middle_ratio(int m) {
  if (m < 0 || m > 30) throw Error(ErrorKind::Range, "exact ratio supported for 0 ≤ m ≤ 30");
  std::uint64_t binom = 1;
  for (int i = 1; i <= m; ++i) binom = binom * static_cast<std::uint64_t>(m + i) / static_cast<std::uint64_t>(i);
  return binom * static_cast<std::uint64_t>(2 * m + 1);
}

double counterexample_deviation_formula(int m, Complex a, Complex b) {
  const double central = std::exp(std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0));
  const double ra = std::abs(a), rb = std::abs(b);
  if (ra == 0.0 || rb == 0.0) return 0.0;
  return (central - 1.0) * std::exp(m * std::log(ra * rb) - 2.0 * m * std::log(ra + rb));
}

double counterexample_deviation_direct(int m, Complex a, Complex b) {
  const int k = 2 * m;
  const RVector round = [&] {
    RVector d(k + 1);
    for (int i = 0; i <= k; ++i) d(i) = std::exp(std::lgamma(i + 1.0) + std::lgamma(k - i + 1.0) - std::lgamma(k + 2.0));
    return d;
  }();
  const FSMetric hilb = fs_metric(HermitianNorm::diagonal(round, monomial_basis(k)), k);
  const FSMetric h = fs_metric(counterexample_norm(k), k);
  const Point p = point_from_homogeneous(a, b);
  // FS metrics are |s|² e^{−r}, so FS(Hilb)/FS(H) = e^{r_H − r_Hilb}.
  return -std::expm1(h.relative_weight(p) - hilb.relative_weight(p));
}

LempertPair lempert_pair(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorKind::Range, "delta must lie in (0, 1]");
  // Monomial index a ↔ x^a y^{2−a}.
  CMatrix t(3, 3);
  t << 0.0, 2.0 * delta, 1.0,
       1.0, 2.0, 0.0,
       0.0, 0.0, 1.0;
  CMatrix tp = t;
  tp.col(0) *= 2.0;
  tp.col(1) *= 0.5;
  auto gram_of = [](const CMatrix& m) {
    const CMatrix g = (m * m.adjoint()).inverse();
    return HermitianNorm(0.5 * (g + g.adjoint()), monomial_basis(2));
  };
  return {delta, t, gram_of(t), gram_of(tp)};
}

double lempert_fs_ratio(const LempertPair& pair, const Point& p) {
  const FSMetric a = fs_metric(pair.h, 2), b = fs_metric(pair.hprime, 2);
  return std::exp(b.relative_weight(p) - a.relative_weight(p));
}

double lempert_ratio_formula(const LempertPair& pair, const Point& p) {
  const CVector e = fs_values(2, p);
  const CVector s = pair.basis.transpose() * e;
  const double n1 = std::norm(s(0)), n2 = std::norm(s(1)), n3 = std::norm(s(2));
  return (4.0 * n1 + 0.25 * n2 + n3) / (n1 + n2 + n3);
}

double lempert_sup_deviation(const LempertPair& pair, int grid) {
  double worst = 0.0;
  for (const Point& p : fs_grid(grid)) worst = std::max(worst, std::abs(lempert_fs_ratio(pair, p) - 1.0));
  return worst;
}

std::vector<InductiveRow> inductive_hilbert_scan(const HermitianNorm& h1, const std::vector<int>& degrees,
                                                 const QuadratureScheme& scheme) {
  if (h1.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "H₁ must live on degree 1");
  const HermitianNorm base(h1.gram(), monomial_basis(1));
  const MetricOnL root = fs_root(base, 1);
  std::vector<InductiveRow> rows;
  const int kmax = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
  HermitianNorm hk = base;
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) hk = quotient_tensor_norm(hk, base, k - 1, 1);
    if (std::find(degrees.begin(), degrees.end(), k) == degrees.end()) continue;
    const HermitianNorm hilb = quadrature_gram(k, root, scheme);
    InductiveRow r;
    r.k = k;
    r.distance = goldman_iwahori(hk, hilb);
    r.scaled = r.distance / k;
    // dim V = 2 on P¹: k!/(k + 1)! = 1/(k + 1)
    const CMatrix predicted = hk.gram() / double(k + 1);
    const RVector d = hilb.gram().diagonal().real().cwiseSqrt();
    r.factor_residual = ((hilb.gram() - predicted).cwiseAbs().array() / (d * d.transpose()).array()).maxCoeff();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace srm
