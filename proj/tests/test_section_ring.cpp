#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "srm/random.hpp"
#include "srm/section_ring.hpp"

using namespace srm;

namespace {

HermitianNorm round_hilb(int k) {
  RVector d(k + 1);
  for (int a = 0; a <= k; ++a) d(a) = std::exp(std::lgamma(a + 1.0) + std::lgamma(k - a + 1.0) - std::lgamma(k + 2.0));
  return HermitianNorm::diagonal(d, monomial_basis(k));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Complex eval(const SectionVector& f, Complex z) {
  Complex acc = 0.0, p = 1.0;
  for (Index a = 0; a < f.coeffs.size(); ++a, p *= z) acc += f.coeffs(a) * p;
  return acc;
}

}  // namespace

TEST_CASE("multiplication of sections") {
  const SectionVector x = SectionVector::monomial(1, 1), y = SectionVector::monomial(1, 0);
  const SectionVector xy = multiply(x, y);
  CHECK(xy.degree == 2);
  CHECK(std::abs(xy.coeffs(1) - 1.0) < 1e-15);
  CHECK(xy.coeffs.cwiseAbs().sum() == doctest::Approx(1.0));

  SectionVector p(1, CVector::Ones(2)), m(1, CVector::Ones(2));
  m.coeffs(0) = -1.0;  // x − y
  const SectionVector sq = multiply(p, m);
  CHECK(std::abs(sq.coeffs(0) + 1.0) < 1e-15);
  CHECK(std::abs(sq.coeffs(1)) < 1e-15);
  CHECK(std::abs(sq.coeffs(2) - 1.0) < 1e-15);

  Rng rng = make_stream(1, 0);
  const SectionVector f(3, random_cvector(4, rng)), g(5, random_cvector(6, rng));
  const SectionVector fg = multiply(f, g);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Complex z(std::cos(0.7 * i) * 0.1 * i, std::sin(0.7 * i) * 0.1 * i);
    worst = std::max(worst, std::abs(eval(fg, z) - eval(f, z) * eval(g, z)));
  }
  CHECK(worst < 1e-12);
  CHECK(MultMap(3, 5).matrix.rows() == 9);
  CHECK(MultMap(3, 5).matrix.cols() == 24);
}

TEST_CASE("quotient tensor norm fixture") {
  const HermitianNorm q = quotient_tensor_norm(round_hilb(1), round_hilb(1), 1, 1);
  CHECK(q.gram()(0, 0).real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q.gram()(1, 1).real() == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(q.gram()(2, 2).real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK((q.gram() - 0.75 * round_hilb(2).gram()).cwiseAbs().maxCoeff() < 1e-12);

  // Tensoring with the degree-0 line rescales.
  const HermitianNorm c = HermitianNorm::diagonal(RVector::Constant(1, 4.0), monomial_basis(0));
  const HermitianNorm r = quotient_tensor_norm(c, round_hilb(3), 0, 3);
  CHECK((r.gram() - 4.0 * round_hilb(3).gram()).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng = make_stream(2, 0);
  const HermitianNorm a(random_spd(3, rng), monomial_basis(2)), b(random_spd(4, rng), monomial_basis(3));
  CHECK(goldman_iwahori(quotient_tensor_norm(a, b, 2, 3), quotient_tensor_norm(b, a, 3, 2)) < 1e-10);
}

TEST_CASE("iterated quotients agree with two-step quotients") {
  const HermitianNorm h = round_hilb(1);
  const HermitianNorm two = quotient_tensor_norm(quotient_tensor_norm(h, h, 1, 1), h, 2, 1);
  const HermitianNorm direct = quotient_tensor_norm(std::vector<HermitianNorm>{h, h, h}, {1, 1, 1});
  CHECK(goldman_iwahori(two, direct) < 1e-10);
}

TEST_CASE("isometry ratio at k = l = 1") {
  HilbertFamily hilb(MetricOnL::round());
  const IsometryRatio r = asym_isometry_ratio(1, 1, hilb);
  // The quotient is exactly (3/4)·Hilb_2; scaling the norm by √(1/2) leaves (3/8)·Hilb_2.
  CHECK(r.gi_distance == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-10));
  CHECK(r.scaled_gi_distance == doctest::Approx(0.5 * std::log(8.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("multiplicative defect") {
  HilbertFamily hilb(MetricOnL::round());
  const CMatrix a = multiplicative_defect(1, 1, hilb);
  // M G_1⁻¹⊗G_1⁻¹ M^H G_2 = diag(4, 8, 4)·diag(1/3, 1/6, 1/3).
  CHECK((a - (4.0 / 3.0) * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(defect_deviation(a, hilb(2), 0.5) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  HilbertFamily ramp(make_metric({"ramp", "ramp", {0.3}}));
  for (auto [k, l] : {std::pair{2, 3}, std::pair{4, 4}}) {
    const CMatrix got = multiplicative_defect(k, l, ramp);
    const CMatrix m = MultMap(k, l).matrix;
    const CMatrix dense = m * kron(ramp(k).inverse_gram(), ramp(l).inverse_gram()) * m.adjoint() * ramp(k + l).gram();
    CHECK((got - dense).cwiseAbs().maxCoeff() < 1e-9 * dense.cwiseAbs().maxCoeff());
    Eigen::ComplexEigenSolver<CMatrix> es(got);
    CHECK(es.eigenvalues().real().minCoeff() > 0.0);
  }
}

TEST_CASE("optimal decomposition") {
  HilbertFamily hilb(MetricOnL::round());
  const TensorElement top = optimal_decomposition(SectionVector::monomial(5, 5), 2, 3, hilb);
  const CMatrix t = top.as_matrix();
  CHECK(std::abs(t(2, 3)) == doctest::Approx(1.0));
  CHECK(t.cwiseAbs().sum() == doctest::Approx(1.0));

  const TensorElement xy = optimal_decomposition(SectionVector::monomial(2, 1), 1, 1, hilb);
  CHECK(std::abs(xy.as_matrix()(0, 1) - 0.5) < 1e-12);
  CHECK(std::abs(xy.as_matrix()(1, 0) - 0.5) < 1e-12);
  CHECK(std::abs(xy.as_matrix()(0, 0)) < 1e-12);

  // Any preimage, optimal or not, maps back to f; the optimal one has the quotient norm.
  Rng rng = make_stream(3, 0);
  const SectionVector f(6, random_cvector(7, rng));
  const TensorElement dec = optimal_decomposition(f, 3, 3, hilb);
  CHECK((MultMap(3, 3).matrix * dec.coeffs - f.coeffs).norm() < 1e-10);
  const double qn = quotient_tensor_norm(hilb(3), hilb(3), 3, 3).norm(f.coeffs);
  CHECK(hermitian_tensor(hilb(3), hilb(3)).norm(dec.coeffs) == doctest::Approx(qn).epsilon(1e-10));
}

TEST_CASE("Banach isometry ratio at low degree") {
  HilbertFamily hilb(MetricOnL::round());
  const BanachIsometryRatio r = l1_linf_isometry_ratio(2, 2, hilb);
  CHECK(r.mult_ratio_max <= 1.0 + 1e-9);
  CHECK(r.linf_lower <= r.linf_upper + 1e-12);
  CHECK(r.linf_upper <= 1.5);
  CHECK(r.l1_lower <= r.l1_upper);
  CHECK(r.l1_lower >= 0.125);
  CHECK(r.l1_upper <= 8.0);
}

TEST_CASE("multiplicatively generated checker") {
  HilbertFamily hilb(MetricOnL::round());
  const GradedNorm n = hilbert_graded_norm(hilb, 12);
  const MultGenReport ok = check_mult_generated(n, 1, 12, {2, 3, 4});
  CHECK(ok.violations.empty());
  CHECK(mult_gen_budget(4) == doctest::Approx(0.5 * std::log(4.0) + 2 + std::log(5.0)));

  // One degree blown up by e^{k²/4}: every split through it is flagged.
  GradedNorm bad = n;
  bad.pieces[8] = n.at(8).scaled(std::exp(16.0));
  const MultGenReport r = check_mult_generated(bad, 1, 12, {2});
  CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const MultGenViolation& v) { return v.degree == 8; }));
  CHECK(r.one_sided_violations > 0);
}

TEST_CASE("graded equivalence distance") {
  HilbertFamily a(MetricOnL::round()), b(make_metric({"ramp", "ramp", {0.3}}));
  const GradedNorm na = hilbert_graded_norm(a, 16), nb = hilbert_graded_norm(b, 16);
  const GradedDistance self = graded_equivalence_distance(na, na, {2, 4, 8, 16});
  for (double d : self.scaled) CHECK(d < 1e-14);
  const GradedDistance d = graded_equivalence_distance(na, nb, {2, 4, 8, 16});
  CHECK(d.scaled.back() == doctest::Approx(0.15).epsilon(0.05));
}

TEST_CASE("line fit") {
  const auto [c0, c1] = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(c0 == doctest::Approx(1.0));
  CHECK(c1 == doctest::Approx(2.0));
}
