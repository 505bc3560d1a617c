#include "srm/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srm/random.hpp"

namespace srm {

const char* to_string(BoundType b) {
  switch (b) {
    case BoundType::Exact: return "exact";
    case BoundType::LowerBound: return "lower-bound";
    case BoundType::UpperBound: return "upper-bound";
    case BoundType::Estimate: return "estimate";
  }
  return "unknown";
}

TensorElement::TensorElement(std::vector<Index> d, CVector c, std::vector<BasisLabel> l)
    : dims(std::move(d)), coeffs(std::move(c)), labels(std::move(l)) {
  const Index total = std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  if (dims.empty() || total != coeffs.size())
    throw Error(ErrorKind::DimensionMismatch, "tensor coefficient count does not match factor dims");
  if (!labels.empty() && labels.size() != dims.size())
    throw Error(ErrorKind::DimensionMismatch, "one basis label per factor required");
}

TensorElement TensorElement::decomposable(const std::vector<CVector>& factors) {
  if (factors.empty()) throw Error(ErrorKind::DimensionMismatch, "no factors");
  CVector acc = factors.front();
  std::vector<Index> dims{factors.front().size()};
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const CVector& v = factors[f];
    CVector next(acc.size() * v.size());
    for (Index i = 0; i < acc.size(); ++i) next.segment(i * v.size(), v.size()) = acc(i) * v;
    acc = std::move(next);
    dims.push_back(v.size());
  }
  return TensorElement(dims, acc);
}

TensorElement TensorElement::from_matrix(const CMatrix& f) {
  CVector c(f.size());
  for (Index i = 0; i < f.rows(); ++i)
    for (Index j = 0; j < f.cols(); ++j) c(i * f.cols() + j) = f(i, j);
  return TensorElement({f.rows(), f.cols()}, c);
}

CMatrix TensorElement::as_matrix() const {
  if (dims.size() != 2) throw Error(ErrorKind::DimensionMismatch, "coefficient matrix needs exactly two factors");
  CMatrix f(dims[0], dims[1]);
  for (Index i = 0; i < dims[0]; ++i)
    for (Index j = 0; j < dims[1]; ++j) f(i, j) = coeffs(i * dims[1] + j);
  return f;
}

HermitianNorm hermitian_tensor(const HermitianNorm& n1, const HermitianNorm& n2) {
  const CMatrix& a = n1.gram();
  const CMatrix& b = n2.gram();
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return HermitianNorm(k, {n1.basis().str() + "*" + n2.basis().str(), -1});
}

HermitianNorm hermitian_tensor(const std::vector<HermitianNorm>& factors) {
  if (factors.empty()) throw Error(ErrorKind::DimensionMismatch, "no factors");
  HermitianNorm acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = hermitian_tensor(acc, factors[i]);
  return acc;
}

CMatrix whitened_coefficients(const CMatrix& f, const HermitianNorm& n1, const HermitianNorm& n2) {
  if (f.rows() != n1.dim() || f.cols() != n2.dim())
    throw Error(ErrorKind::DimensionMismatch, "coefficient matrix does not match factor dims");
  return n1.cholesky_factor().adjoint() * f * n2.cholesky_factor().conjugate();
}

namespace {

void check_two_factor(const TensorElement& f, const NormHandle& n1, const NormHandle& n2) {
  if (f.dims.size() != 2) throw Error(ErrorKind::DimensionMismatch, "tensor norm needs two factors");
  if (f.dims[0] != n1.dim() || f.dims[1] != n2.dim())
    throw Error(ErrorKind::DimensionMismatch, "factor norm dims do not match the tensor");
}

// Σ_i w_i N(row_i) style sums and maxima for the l¹/l∞ identities.
double row_reduce(const CMatrix& f, const NormHandle& lp, const NormHandle& other, bool rows, bool take_max) {
  const Index count = rows ? f.rows() : f.cols();
  double acc = 0.0;
  for (Index i = 0; i < count; ++i) {
    const CVector piece = rows ? CVector(f.row(i).transpose()) : CVector(f.col(i));
    const double v = lp.weights()(i) * other(piece);
    acc = take_max ? std::max(acc, v) : acc + v;
  }
  return acc;
}

// Upper bound Σ N₁(x_k) N₂(y_k) over three explicit decompositions of F:
// singular vectors, rows and columns.
double decomposition_upper_bound(const CMatrix& f, const NormHandle& n1, const NormHandle& n2) {
  Eigen::JacobiSVD<CMatrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double by_svd = 0.0;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()(k);
    if (s == 0.0) continue;
    by_svd += s * n1(svd.matrixU().col(k)) * n2(svd.matrixV().col(k).conjugate());
  }
  double by_rows = 0.0;
  for (Index i = 0; i < f.rows(); ++i) {
    CVector e = CVector::Zero(f.rows());
    e(i) = 1.0;
    by_rows += n1(e) * n2(f.row(i).transpose());
  }
  double by_cols = 0.0;
  for (Index j = 0; j < f.cols(); ++j) {
    CVector e = CVector::Zero(f.cols());
    e(j) = 1.0;
    by_cols += n1(f.col(j)) * n2(e);
  }
  return std::min({by_svd, by_rows, by_cols});
}

// Alternating maximization of |φ^H F conj ψ| over dual unit spheres.
double alternating_injective(const CMatrix& f, const NormHandle& n1, const NormHandle& n2, const TensorOptions& opt,
                             int* starts_used) {
  double best = 0.0;
  for (int s = 0; s < opt.starts; ++s) {
    Rng rng = make_stream(opt.seed, static_cast<std::uint64_t>(s));
    // Start 0 uses the top singular vector, the rest are random.
    CVector psi;
    if (s == 0) {
      Eigen::JacobiSVD<CMatrix> svd(f, Eigen::ComputeThinV);
      psi = svd.matrixV().col(0);
    } else {
      psi = random_cvector(f.cols(), rng);
    }
    double value = 0.0;
    for (int it = 0; it < opt.max_iterations; ++it) {
      const CVector a = f * psi.conjugate();
      if (a.norm() == 0.0) break;
      const CVector phi = n1.norming(a);
      const CVector r = f.transpose() * phi.conjugate();
      const double next = n2(r);
      if (r.norm() == 0.0) break;
      psi = n2.norming(r);
      const bool converged = std::abs(next - value) < opt.tolerance * std::max(1.0, next);
      value = std::max(value, next);
      if (converged) break;
    }
    best = std::max(best, value);
  }
  if (starts_used) *starts_used = opt.starts;
  return best;
}

}  // namespace

TensorNormResult injective_norm(const TensorElement& t, const NormHandle& n1, const NormHandle& n2,
                                const TensorOptions& opt) {
  check_two_factor(t, n1, n2);
  const CMatrix f = t.as_matrix();
  TensorNormResult r;
  if (n1.as_hermitian() && n2.as_hermitian()) {
    const CMatrix w = whitened_coefficients(f, *n1.as_hermitian(), *n2.as_hermitian());
    Eigen::JacobiSVD<CMatrix> svd(w);
    r.value = r.lower = r.upper = svd.singularValues()(0);
    r.exact = true;
    return r;
  }
  if (n1.kind() == NormKind::Linf || n2.kind() == NormKind::Linf) {
    const bool first = n1.kind() == NormKind::Linf;
    r.value = first ? row_reduce(f, n1, n2, true, true) : row_reduce(f, n2, n1, false, true);
    r.lower = r.upper = r.value;
    r.exact = true;
    return r;
  }
  r.value = r.lower = alternating_injective(f, n1, n2, opt, &r.starts);
  r.upper = decomposition_upper_bound(f, n1, n2);
  r.bound = BoundType::LowerBound;
  return r;
}

TensorNormResult projective_norm(const TensorElement& t, const NormHandle& n1, const NormHandle& n2,
                                 const TensorOptions& opt) {
  check_two_factor(t, n1, n2);
  const CMatrix f = t.as_matrix();
  TensorNormResult r;
  if (n1.as_hermitian() && n2.as_hermitian()) {
    const CMatrix w = whitened_coefficients(f, *n1.as_hermitian(), *n2.as_hermitian());
    Eigen::JacobiSVD<CMatrix> svd(w);
    r.value = r.lower = r.upper = svd.singularValues().sum();
    r.exact = true;
    return r;
  }
  if (n1.kind() == NormKind::L1 || n2.kind() == NormKind::L1) {
    const bool first = n1.kind() == NormKind::L1;
    r.value = first ? row_reduce(f, n1, n2, true, false) : row_reduce(f, n2, n1, false, false);
    r.lower = r.upper = r.value;
    r.exact = true;
    return r;
  }

  // π(f) = sup |⟨G, f⟩| / ε*(G) with ε* the injective norm for the dual factors.
  r.upper = decomposition_upper_bound(f, n1, n2);
  r.bound = BoundType::Estimate;
  NormHandle d1, d2;
  try {
    d1 = n1.dual_handle();
    d2 = n2.dual_handle();
  } catch (const Error&) {
    r.value = r.upper;
    return r;
  }
  std::vector<CMatrix> candidates;
  candidates.push_back(f);
  {
    Eigen::JacobiSVD<CMatrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CMatrix g = CMatrix::Zero(f.rows(), f.cols());
    for (Index k = 0; k < svd.singularValues().size(); ++k) {
      if (svd.singularValues()(k) == 0.0) continue;
      const CVector phi = n1.norming(svd.matrixU().col(k));
      const CVector psi = n2.norming(svd.matrixV().col(k).conjugate());
      g += phi * psi.transpose();
    }
    candidates.push_back(g);
  }
  Rng rng = make_stream(opt.seed, 0x70726f6a);
  for (int s = 0; s < 8; ++s) candidates.push_back(random_cmatrix(f.rows(), f.cols(), rng));

  TensorOptions inner = opt;
  inner.starts = std::max(4, opt.starts / 4);
  double estimate = 0.0;
  double certified = 0.0;
  for (const CMatrix& g : candidates) {
    const double pairing = std::abs(g.cwiseProduct(f.conjugate()).sum());
    if (pairing == 0.0) continue;
    const TensorElement ge = TensorElement::from_matrix(g);
    const TensorNormResult eps = injective_norm(ge, d1, d2, inner);
    if (eps.value > 0.0) estimate = std::max(estimate, pairing / eps.value);
    if (eps.upper > 0.0) certified = std::max(certified, pairing / eps.upper);
  }
  r.lower = std::min(certified, r.upper);
  r.value = std::min(estimate, r.upper);
  r.starts = inner.starts * static_cast<int>(candidates.size());
  return r;
}

SandwichReport tensor_norm_sandwich_check(const TensorElement& f, const NormHandle& n1, const NormHandle& n2,
                                          double tol) {
  SandwichReport rep;
  const TensorNormResult eps = injective_norm(f, n1, n2);
  const TensorNormResult pi = projective_norm(f, n1, n2);
  rep.injective = eps.value;
  rep.projective = pi.value;
  rep.exact = eps.exact && pi.exact;
  const double d1 = static_cast<double>(n1.dim());
  const double d2 = static_cast<double>(n2.dim());
  rep.dim_factor = d1 * d2 / std::max(d1, d2);
  const double scale = std::max(1.0, rep.projective);
  bool ok = rep.injective <= rep.projective + tol * scale;
  ok = ok && rep.projective <= rep.injective * rep.dim_factor + tol * scale;
  if (n1.as_hermitian() && n2.as_hermitian()) {
    rep.hermitian = hermitian_tensor(*n1.as_hermitian(), *n2.as_hermitian()).norm(f.coeffs);
    ok = ok && rep.injective <= rep.hermitian + tol * scale && rep.hermitian <= rep.projective + tol * scale;
  } else {
    rep.hermitian = std::numeric_limits<double>::quiet_NaN();
  }
  rep.holds = ok;
  return rep;
}

DualityReport duality_check(const TensorElement& t, const HermitianNorm& n1, const HermitianNorm& n2) {
  const CMatrix f = t.as_matrix();
  DualityReport rep;
  const NormHandle h1d = NormHandle::hermitian(dual_norm(n1));
  const NormHandle h2d = NormHandle::hermitian(dual_norm(n2));
  rep.projective_dual = projective_norm(t, h1d, h2d).value;

  // The maximizer of |tr(G^H F)| over σ_max(L₁^H G conj L₂) ≤ 1 is
  // G = L₁^{-H} U V^H conj(L₂)^{-1} for the SVD of L₁^{-1} F conj(L₂)^{-H}.
  const CMatrix l1 = n1.cholesky_factor();
  const CMatrix l2c = n2.cholesky_factor().conjugate();
  const CMatrix m = l1.triangularView<Eigen::Lower>().solve(f);
  const CMatrix core = l2c.triangularView<Eigen::Lower>().solve(m.adjoint()).adjoint();
  Eigen::JacobiSVD<CMatrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMatrix h = svd.matrixU() * svd.matrixV().adjoint();
  const CMatrix left = l1.adjoint().triangularView<Eigen::Upper>().solve(h);
  const CMatrix g = l2c.transpose().triangularView<Eigen::Upper>().solve(left.transpose()).transpose();
  rep.trace_sup = std::abs((g.adjoint() * f).trace());
  rep.witness_injective =
      injective_norm(TensorElement::from_matrix(g), NormHandle::hermitian(n1), NormHandle::hermitian(n2)).value;
  rep.residual = std::abs(rep.projective_dual - rep.trace_sup) / std::max(1.0, rep.projective_dual);
  return rep;
}

LawsReport assoc_and_quotient_laws_check(const HermitianNorm& n1, const HermitianNorm& n2, const HermitianNorm& n3,
                                         const CMatrix& first, const CMatrix& full, const CMatrix& q1,
                                         const CMatrix& q2, std::uint64_t seed) {
  LawsReport rep;
  const Index d1 = n1.dim(), d2 = n2.dim(), d3 = n3.dim();

  // (a) Kronecker associativity
  const CMatrix left = hermitian_tensor(hermitian_tensor(n1, n2), n3).gram();
  const CMatrix right = hermitian_tensor(n1, hermitian_tensor(n2, n3)).gram();
  rep.kronecker_associativity = (left - right).cwiseAbs().maxCoeff();

  // (b) [[N₁⊗N₂]⊗N₃] = [N₁⊗N₂⊗N₃] along full = second ∘ (first ⊗ id)
  if (first.cols() != d1 * d2 || full.cols() != d1 * d2 * d3)
    throw Error(ErrorKind::DimensionMismatch, "quotient maps do not match factor dims");
  const Index w = first.rows();
  CMatrix lifted = CMatrix::Zero(w * d3, d1 * d2 * d3);  // first ⊗ id₃
  for (Index r = 0; r < w; ++r)
    for (Index c = 0; c < d1 * d2; ++c)
      for (Index k = 0; k < d3; ++k) lifted(r * d3 + k, c * d3 + k) = first(r, c);
  const CMatrix second = lifted.adjoint().completeOrthogonalDecomposition().solve(full.adjoint()).adjoint();
  const double fit = (second * lifted - full).cwiseAbs().maxCoeff();
  if (fit > 1e-9 * std::max(1.0, full.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::Precondition, "quotient map does not factor through the first-stage map (residual " +
                                             std::to_string(fit) + ")");
  const HermitianNorm inner = quotient_norm(hermitian_tensor(n1, n2), first);
  const HermitianNorm two_step = quotient_norm(hermitian_tensor(inner, n3), second);
  const HermitianNorm one_step = quotient_norm(hermitian_tensor(std::vector<HermitianNorm>{n1, n2, n3}), full);
  rep.quotient_transitivity = goldman_iwahori(two_step, one_step);

  // (c) factorwise quotients commute with tensor products
  const HermitianNorm m1 = quotient_norm(n1, q1);
  const HermitianNorm m2 = quotient_norm(n2, q2);
  CMatrix q12 = CMatrix::Zero(q1.rows() * q2.rows(), d1 * d2);
  for (Index a = 0; a < q1.rows(); ++a)
    for (Index b = 0; b < q1.cols(); ++b) q12.block(a * q2.rows(), b * d2, q2.rows(), d2) = q1(a, b) * q2;
  rep.hermitian_quotient_product = goldman_iwahori(quotient_norm(hermitian_tensor(n1, n2), q12),
                                                   hermitian_tensor(m1, m2).relabeled(BasisLabel{}));

  // Minimal-norm lifts s_i = G_i^{-1} q_i^H M_i are isometric sections of q_i.
  const CMatrix s1 = n1.solve(q1.adjoint()) * m1.gram();
  const CMatrix s2 = n2.solve(q2.adjoint()) * m2.gram();
  Rng rng = make_stream(seed, 0x6c617773);
  const CMatrix g = random_cmatrix(q1.rows(), q2.rows(), rng);
  const NormHandle h1 = NormHandle::hermitian(n1), h2 = NormHandle::hermitian(n2);
  const double target =
      projective_norm(TensorElement::from_matrix(g), NormHandle::hermitian(m1), NormHandle::hermitian(m2)).value;
  const CMatrix lift = s1 * g * s2.transpose();
  const double lifted_norm = projective_norm(TensorElement::from_matrix(lift), h1, h2).value;
  rep.projective_lift_residual = std::abs(lifted_norm - target) / std::max(1.0, target);

  // Fiber points lift + kernel directions never go below the quotient value.
  Eigen::FullPivLU<CMatrix> lu(q12);
  const CMatrix kernel = lu.kernel();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 64; ++s) {
    CVector dir = CVector::Zero(d1 * d2);
    if (kernel.cols() > 0 && lu.dimensionOfKernel() > 0)
      dir = kernel * random_cvector(kernel.cols(), rng) * (0.3 * lift.norm() / std::sqrt(double(kernel.cols())));
    CMatrix fm = lift;
    for (Index i = 0; i < d1; ++i)
      for (Index j = 0; j < d2; ++j) fm(i, j) += dir(i * d2 + j);
    const double v = projective_norm(TensorElement::from_matrix(fm), h1, h2).value;
    min_ratio = std::min(min_ratio, v / target);
  }
  rep.projective_fiber_min_ratio = min_ratio;
  return rep;
}

}  // namespace srm
