#include "srm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srm/random.hpp"

namespace srm {

struct HermitianNorm::Factor {
  RVector scale;  // d_i = 1/sqrt(G_ii); equilibrated gram = D G D
  Eigen::LLT<CMatrix> llt;
};

HermitianNorm::HermitianNorm(CMatrix gram, BasisLabel basis) : gram_(std::move(gram)), basis_(std::move(basis)) {
  const Index n = gram_.rows();
  if (n == 0 || gram_.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "gram must be square and non-empty");

  RVector scale(n);
  for (Index i = 0; i < n; ++i) {
    const Complex d = gram_(i, i);
    if (!(d.real() > 0.0) || !std::isfinite(d.real()))
      throw Error(ErrorKind::IllConditioned, "gram diagonal entry " + std::to_string(i) + " is not positive");
    scale(i) = 1.0 / std::sqrt(d.real());
  }
  CMatrix eq = scale.asDiagonal() * gram_ * scale.asDiagonal();
  const double asym = (eq - eq.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, eq.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::Precondition, "gram is not Hermitian (relative asymmetry " + std::to_string(asym) + ")");
  eq = 0.5 * (eq + eq.adjoint());
  gram_ = 0.5 * (gram_ + gram_.adjoint());

  Eigen::SelfAdjointEigenSolver<CMatrix> es(eq, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0))
    throw Error(ErrorKind::IllConditioned, "gram is not positive definite (min eigenvalue " + std::to_string(lo) + ")");
  condition_ = hi / lo;
  if (condition_ > kMaxCondition)
    throw Error(ErrorKind::IllConditioned, "condition number " + std::to_string(condition_) + " exceeds 1e14");

  auto f = std::make_shared<Factor>();
  f->scale = scale;
  f->llt.compute(eq);
  if (f->llt.info() != Eigen::Success) throw Error(ErrorKind::IllConditioned, "Cholesky factorization failed");
  factor_ = std::move(f);
}

HermitianNorm HermitianNorm::identity(Index dim, BasisLabel basis) {
  return HermitianNorm(CMatrix::Identity(dim, dim), std::move(basis));
}

HermitianNorm HermitianNorm::diagonal(const RVector& entries, BasisLabel basis) {
  return HermitianNorm(entries.cast<Complex>().asDiagonal().toDenseMatrix(), std::move(basis));
}

double HermitianNorm::norm_squared(const CVector& v) const {
  if (v.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "vector size does not match norm dimension");
  return std::max(0.0, v.dot(gram_ * v).real());
}

double HermitianNorm::norm(const CVector& v) const { return std::sqrt(norm_squared(v)); }

HermitianNorm HermitianNorm::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorKind::Range, "norm scaling must be positive");
  HermitianNorm out = *this;
  out.gram_ *= c * c;
  auto f = std::make_shared<Factor>(*factor_);
  f->scale /= c;
  out.factor_ = std::move(f);
  return out;
}

HermitianNorm HermitianNorm::relabeled(BasisLabel basis) const {
  HermitianNorm out = *this;
  out.basis_ = std::move(basis);
  return out;
}

CMatrix HermitianNorm::cholesky_factor() const {
  CMatrix l = factor_->llt.matrixL();
  return factor_->scale.cwiseInverse().asDiagonal() * l;
}

CMatrix HermitianNorm::whiten(const CMatrix& b) const {
  CMatrix scaled = factor_->scale.asDiagonal() * b;
  return factor_->llt.matrixL().solve(scaled);
}

CMatrix HermitianNorm::solve(const CMatrix& b) const {
  CMatrix scaled = factor_->scale.asDiagonal() * b;
  return factor_->scale.asDiagonal() * factor_->llt.solve(scaled);
}

CMatrix HermitianNorm::inverse_gram() const {
  CMatrix inv = solve(CMatrix::Identity(dim(), dim()));
  return 0.5 * (inv + inv.adjoint());
}

// ---------------------------------------------------------------------------

namespace {

CVector phase_of(const CVector& v) {
  CVector p(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    p(i) = a > 0.0 ? v(i) / a : Complex(1.0, 0.0);
  }
  return p;
}

// Finite-difference gradient of a real norm in the real coordinates
// (Re v, Im v), assembled as a complex vector: for smooth norms this is the
// norming functional under the pairing φ^H v.
CVector numeric_norming(const NormHandle::Evaluator& f, const CVector& v) {
  const double nv = f(v);
  const double h = 1e-7 * std::max(1.0, v.cwiseAbs().maxCoeff());
  CVector g(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    CVector p = v, m = v;
    p(i) += h;
    m(i) -= h;
    const double dre = (f(p) - f(m)) / (2.0 * h);
    p = v;
    m = v;
    p(i) += Complex(0.0, h);
    m(i) -= Complex(0.0, h);
    const double dim = (f(p) - f(m)) / (2.0 * h);
    g(i) = Complex(dre, dim);
  }
  const double pair = g.dot(v).real();
  if (pair > 0.0) g *= nv / pair;
  return g;
}

}  // namespace

NormHandle NormHandle::hermitian(HermitianNorm norm) {
  NormHandle h;
  h.dim_ = norm.dim();
  h.kind_ = NormKind::Hermitian;
  h.hermitian_ = norm;
  auto shared = std::make_shared<const HermitianNorm>(std::move(norm));
  auto dual = std::make_shared<const HermitianNorm>(dual_norm(*shared));
  h.evaluate_ = [shared](const CVector& v) { return shared->norm(v); };
  h.dual_ = [dual](const CVector& phi) { return dual->norm(phi); };
  h.norming_ = [shared](const CVector& v) -> CVector {
    const double n = shared->norm(v);
    if (n == 0.0) return CVector::Zero(v.size());
    return shared->gram() * v / n;
  };
  return h;
}

NormHandle NormHandle::l1(Index dim, std::optional<RVector> weights) {
  NormHandle h;
  h.dim_ = dim;
  h.kind_ = NormKind::L1;
  h.weights_ = weights.value_or(RVector::Ones(dim));
  if (h.weights_.size() != dim || h.weights_.minCoeff() <= 0.0)
    throw Error(ErrorKind::Range, "l1 weights must be positive and match the dimension");
  const RVector w = h.weights_;
  h.evaluate_ = [w](const CVector& v) { return w.dot(v.cwiseAbs()); };
  h.dual_ = [w](const CVector& phi) { return phi.cwiseAbs().cwiseQuotient(w).maxCoeff(); };
  h.norming_ = [w](const CVector& v) -> CVector { return w.cast<Complex>().cwiseProduct(phase_of(v)); };
  return h;
}

NormHandle NormHandle::linf(Index dim, std::optional<RVector> weights) {
  NormHandle h;
  h.dim_ = dim;
  h.kind_ = NormKind::Linf;
  h.weights_ = weights.value_or(RVector::Ones(dim));
  if (h.weights_.size() != dim || h.weights_.minCoeff() <= 0.0)
    throw Error(ErrorKind::Range, "linf weights must be positive and match the dimension");
  const RVector w = h.weights_;
  h.evaluate_ = [w](const CVector& v) { return v.cwiseAbs().cwiseProduct(w).maxCoeff(); };
  h.dual_ = [w](const CVector& phi) { return phi.cwiseAbs().cwiseQuotient(w).sum(); };
  h.norming_ = [w](const CVector& v) -> CVector {
    Index arg = 0;
    (void)v.cwiseAbs().cwiseProduct(w).maxCoeff(&arg);
    CVector phi = CVector::Zero(v.size());
    const double a = std::abs(v(arg));
    phi(arg) = w(arg) * (a > 0.0 ? v(arg) / a : Complex(1.0, 0.0));
    return phi;
  };
  return h;
}

NormHandle NormHandle::custom(Index dim, Evaluator evaluate, std::optional<Evaluator> dual,
                              std::optional<Norming> norming) {
  NormHandle h;
  h.dim_ = dim;
  h.kind_ = NormKind::Custom;
  h.evaluate_ = std::move(evaluate);
  h.dual_ = std::move(dual);
  h.norming_ = std::move(norming);
  return h;
}

double NormHandle::dual(const CVector& phi) const {
  if (!dual_) throw Error(ErrorKind::Unsupported, "norm has no exact dual evaluator");
  return (*dual_)(phi);
}

CVector NormHandle::norming(const CVector& v) const {
  if (norming_) return (*norming_)(v);
  return numeric_norming(evaluate_, v);
}

NormHandle NormHandle::dual_handle() const {
  switch (kind_) {
    case NormKind::Hermitian: return hermitian(dual_norm(*hermitian_));
    case NormKind::L1: return linf(dim_, weights_.cwiseInverse());
    case NormKind::Linf: return l1(dim_, weights_.cwiseInverse());
    case NormKind::Custom:
      if (!dual_) throw Error(ErrorKind::Unsupported, "custom norm has no dual evaluator");
      return custom(dim_, *dual_, evaluate_);
  }
  throw Error(ErrorKind::Unsupported, "unknown norm kind");
}

void NormHandle::check_axioms(std::uint64_t seed, int trials) const {
  Rng rng = make_stream(seed, 0x61786973);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const CVector v = random_cvector(dim_, rng);
    const Complex c(g(rng), g(rng));
    const double nv = evaluate_(v);
    if (!(nv > 0.0)) throw Error(ErrorKind::NormAxiom, "norm vanishes on a nonzero vector");
    const double ncv = evaluate_(c * v);
    if (std::abs(ncv - std::abs(c) * nv) > 1e-9 * std::abs(c) * nv)
      throw Error(ErrorKind::NormAxiom, "norm is not absolutely homogeneous");
  }
  if (evaluate_(CVector::Zero(dim_)) != 0.0) throw Error(ErrorKind::NormAxiom, "norm of zero is nonzero");
}

// ---------------------------------------------------------------------------

HermitianNorm dual_norm(const HermitianNorm& n) {
  BasisLabel b = n.basis();
  b.name += "*";
  return HermitianNorm(n.inverse_gram(), b);
}

HermitianNorm quotient_norm(const HermitianNorm& n, const CMatrix& proj, BasisLabel target_basis) {
  if (proj.cols() != n.dim())
    throw Error(ErrorKind::DimensionMismatch, "projection columns must equal the source dimension");
  if (proj.rows() > proj.cols())
    throw Error(ErrorKind::NotSurjective, "projection has more rows than columns");
  Eigen::ColPivHouseholderQR<CMatrix> qr(proj.adjoint());
  qr.setThreshold(1e-12);
  if (qr.rank() < proj.rows())
    throw Error(ErrorKind::NotSurjective,
                "projection rank " + std::to_string(qr.rank()) + " < " + std::to_string(proj.rows()));
  // proj G^{-1} proj^H = (L^{-1} proj^H)^H (L^{-1} proj^H)
  const CMatrix w = n.whiten(proj.adjoint());
  CMatrix m = w.adjoint() * w;
  m = 0.5 * (m + m.adjoint());
  const HermitianNorm inner(m, target_basis);
  return HermitianNorm(inner.inverse_gram(), std::move(target_basis));
}

RVector relative_spectrum(const HermitianNorm& a, const HermitianNorm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "norms have different dimensions");
  const CMatrix half = a.whiten(b.gram());              // L^{-1} G_b
  CMatrix w = a.whiten(half.adjoint());                  // L^{-1} G_b L^{-H}
  w = 0.5 * (w + w.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double goldman_iwahori(const HermitianNorm& a, const HermitianNorm& b) {
  if (!(a.basis() == b.basis()))
    throw Error(ErrorKind::DimensionMismatch, "basis mismatch: " + a.basis().str() + " vs " + b.basis().str());
  const RVector ev = relative_spectrum(a, b);
  if (ev.minCoeff() <= 0.0) throw Error(ErrorKind::IllConditioned, "non-positive relative eigenvalue");
  return 0.5 * std::max(std::abs(std::log(ev.minCoeff())), std::abs(std::log(ev.maxCoeff())));
}

bool norm_leq(const HermitianNorm& a, const HermitianNorm& b, double c, double tol) {
  // ‖v‖_a² ≤ c² ‖v‖_b²  ⇔  λ_max(G_a relative to G_b) ≤ c²
  const RVector ev = relative_spectrum(b, a);
  return ev.maxCoeff() <= c * c * (1.0 + tol);
}

SampledDistance goldman_iwahori_sampled(const NormHandle& a, const NormHandle& b, int n_samples,
                                        std::uint64_t seed) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "norms have different dimensions");
  if (n_samples < 1) throw Error(ErrorKind::Range, "n_samples must be at least 1");
  const Index n = a.dim();
  Rng rng = make_stream(seed, 0x6769);

  auto score = [&](const CVector& v) {
    const double na = a(v);
    const double nb = b(v);
    if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorKind::NormAxiom, "norm evaluator returned 0 on a nonzero vector");
    return std::abs(std::log(na / nb));
  };

  SampledDistance out;
  std::vector<std::pair<double, CVector>> best;
  for (int s = 0; s < n_samples; ++s) {
    CVector v = random_cvector(n, rng);
    v /= v.norm();
    const double d = score(v);
    best.emplace_back(d, v);
  }
  const std::size_t keep = std::min<std::size_t>(8, best.size());
  std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(keep), best.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
  out.lower_bound = best.front().first;
  out.argmax = best.front().second;
  out.samples = n_samples;

  // Local refinement around the leading samples: random perturbations with a
  // shrinking radius, accepted only when they improve the ratio.
  for (std::size_t i = 0; i < keep; ++i) {
    CVector v = best[i].second;
    double d = best[i].first;
    double radius = 0.1;
    for (int it = 0; it < 400 && radius > 1e-7; ++it) {
      CVector trial = v + radius * random_cvector(n, rng) / std::sqrt(static_cast<double>(n));
      trial /= trial.norm();
      const double dt = score(trial);
      ++out.samples;
      if (dt > d) {
        d = dt;
        v = trial;
      } else if (it % 20 == 19) {
        radius *= 0.5;
      }
    }
    if (d > out.lower_bound) {
      out.lower_bound = d;
      out.argmax = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GeodesicPath::GeodesicPath(HermitianNorm start, HermitianNorm end) : start_(std::move(start)), end_(std::move(end)) {
  if (start_.dim() != end_.dim()) throw Error(ErrorKind::DimensionMismatch, "geodesic endpoints differ in dimension");
  if (!(start_.basis() == end_.basis()))
    throw Error(ErrorKind::DimensionMismatch, "geodesic endpoints use different bases");
  const CMatrix half = start_.whiten(end_.gram());
  CMatrix w = start_.whiten(half.adjoint());
  w = 0.5 * (w + w.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w);
  eigenvalues_ = es.eigenvalues();
  if (eigenvalues_.minCoeff() <= 0.0) throw Error(ErrorKind::IllConditioned, "transfer operator is not positive");
  frame_ = start_.cholesky_factor() * es.eigenvectors();
}

HermitianNorm norm_geodesic(const GeodesicPath& path, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::Range, "geodesic parameter must lie in [0, 1]");
  if (t == 0.0) return path.start_;
  if (t == 1.0) return path.end_;
  const RVector powered = path.eigenvalues_.array().pow(t).matrix();
  CMatrix g = path.frame_ * powered.cast<Complex>().asDiagonal() * path.frame_.adjoint();
  return HermitianNorm(0.5 * (g + g.adjoint()), path.start_.basis());
}

double operator_norm(const CMatrix& op, const HermitianNorm& from, const HermitianNorm& to) {
  if (op.cols() != from.dim() || op.rows() != to.dim())
    throw Error(ErrorKind::DimensionMismatch, "operator shape does not match the norms");
  const CMatrix right = from.whiten(op.adjoint()).adjoint();  // op L_U^{-H}
  const CMatrix m = to.cholesky_factor().adjoint() * right;   // L_V^H op L_U^{-H}
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double ContractionReport::max_norm() const {
  return operator_norms.empty() ? 0.0 : *std::max_element(operator_norms.begin(), operator_norms.end());
}

ContractionReport check_contraction_interpolation(const CMatrix& pi, const HermitianNorm& nu0,
                                                  const HermitianNorm& nu1, const HermitianNorm& nv0,
                                                  const HermitianNorm& nv1, const std::vector<double>& t_grid) {
  constexpr double slack = 1.0 + 1e-9;
  const double e0 = operator_norm(pi, nu0, nv0);
  if (e0 > slack) throw Error(ErrorKind::Precondition, "map is not contracting at endpoint t=0 (norm " + std::to_string(e0) + ")");
  const double e1 = operator_norm(pi, nu1, nv1);
  if (e1 > slack) throw Error(ErrorKind::Precondition, "map is not contracting at endpoint t=1 (norm " + std::to_string(e1) + ")");

  const GeodesicPath pu(nu0, nu1);
  const GeodesicPath pv(nv0, nv1);
  ContractionReport report;
  for (double t : t_grid) {
    report.t.push_back(t);
    report.operator_norms.push_back(operator_norm(pi, norm_geodesic(pu, t), norm_geodesic(pv, t)));
  }
  return report;
}

}  // namespace srm
