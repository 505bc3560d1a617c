#include <cmath>
#include <numbers>

#include "doctest.h"
#include "srm/norms.hpp"
#include "srm/random.hpp"

using namespace srm;

namespace {

HermitianNorm diag(std::initializer_list<double> d) {
  RVector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return HermitianNorm::diagonal(v);
}

}  // namespace

TEST_CASE("construction validates the gram") {
  CMatrix g(2, 2);
  g << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(HermitianNorm{g}, Error);
  CHECK_THROWS_AS(diag({1.0, -1.0}), Error);
  CMatrix near(2, 2);
  near << 1.0, 1.0, 1.0, 1.0 + 1e-15;
  try {
    (void)HermitianNorm{near};
    FAIL("near-singular gram accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IllConditioned);
  }
}

TEST_CASE("jacobi equilibration keeps a diagonally scaled gram usable") {
  // cond(G) = 1e20 but the equilibrated condition number is 1.
  const HermitianNorm n = diag({1.0, 1e-20});
  CHECK(n.condition_number() < 10.0);
  CVector v(2);
  v << 0.0, 1.0;
  CHECK(n.norm(v) == doctest::Approx(1e-10).epsilon(1e-12));
}

TEST_CASE("norm axioms on random grams") {
  Rng rng = make_stream(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianNorm n(random_spd(4, rng));
    const CVector v = random_cvector(4, rng), w = random_cvector(4, rng);
    const Complex c(0.3, -1.7);
    CHECK(n.norm(c * v) == doctest::Approx(std::abs(c) * n.norm(v)).epsilon(1e-12));
    CHECK(n.norm(v + w) <= n.norm(v) + n.norm(w) + 1e-12);
    CHECK(n.norm(v) > 0.0);
  }
  CHECK(HermitianNorm::identity(3).norm(CVector::Zero(3)) == 0.0);
}

TEST_CASE("dual norm") {
  CHECK((dual_norm(HermitianNorm::identity(3)).gram() - CMatrix::Identity(3, 3)).norm() < 1e-14);
  CHECK(dual_norm(diag({4.0})).gram()(0, 0).real() == doctest::Approx(0.25));

  // Oracle: sup_v |⟨w, v⟩|/‖v‖_G by sampling; never exceeds ‖w‖_{G⁻¹}, and the
  // maximizer v = G⁻¹w attains it.
  Rng rng = make_stream(5, 0);
  const HermitianNorm n(random_spd(3, rng));
  const HermitianNorm d = dual_norm(n);
  for (int i = 0; i < 200; ++i) {
    const CVector w = random_cvector(3, rng);
    double best = 0.0;
    for (int j = 0; j < 5; ++j) {
      const CVector v = random_cvector(3, rng);
      best = std::max(best, std::abs(w.dot(v)) / n.norm(v));
    }
    CHECK(best <= d.norm(w) * (1 + 1e-12));
    const CVector vstar = n.gram().ldlt().solve(w);
    CHECK(std::abs(w.dot(vstar)) / n.norm(vstar) == doctest::Approx(d.norm(w)).epsilon(1e-10));
  }
}

TEST_CASE("quotient norm") {
  CMatrix p(1, 2);
  p << 1.0, 1.0;
  CHECK(quotient_norm(HermitianNorm::identity(2), p).gram()(0, 0).real() == doctest::Approx(0.5));

  Rng rng = make_stream(6, 0);
  const HermitianNorm n(random_spd(3, rng));
  CHECK(goldman_iwahori(quotient_norm(n, CMatrix::Identity(3, 3)), n) < 1e-12);

  // Oracle: the minimal-norm preimage of e_i under p, solved as a constrained
  // least-squares problem via its KKT system.
  const CMatrix q = random_cmatrix(2, 3, rng);
  const HermitianNorm quot = quotient_norm(n, q);
  for (int i = 0; i < 2; ++i) {
    CMatrix kkt = CMatrix::Zero(5, 5);
    kkt.topLeftCorner(3, 3) = n.gram();
    kkt.topRightCorner(3, 2) = q.adjoint();
    kkt.bottomLeftCorner(2, 3) = q;
    CVector rhs = CVector::Zero(5);
    rhs(3 + i) = 1.0;
    const CVector sol = kkt.fullPivLu().solve(rhs);
    const CVector e = CVector::Unit(2, i);
    CHECK(quot.norm(e) == doctest::Approx(n.norm(sol.head(3))).epsilon(1e-10));
  }

  CMatrix rank_deficient(2, 3);
  rank_deficient << 1, 0, 0, 2, 0, 0;
  try {
    (void)quotient_norm(n, rank_deficient);
    FAIL("rank-deficient projection accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSurjective);
  }
}

TEST_CASE("goldman-iwahori distance") {
  Rng rng = make_stream(7, 0);
  const HermitianNorm a(random_spd(3, rng)), b(random_spd(3, rng)), c(random_spd(3, rng));
  CHECK(goldman_iwahori(a, a) < 1e-13);
  CHECK(goldman_iwahori(HermitianNorm::identity(2), diag({std::exp(2.0), std::exp(2.0)})) == doctest::Approx(1.0));
  CHECK(goldman_iwahori(diag({1.0}), diag({9.0})) == doctest::Approx(std::log(3.0)));
  CHECK(goldman_iwahori(a, b) == doctest::Approx(goldman_iwahori(b, a)).epsilon(1e-12));
  CHECK(goldman_iwahori(a, c) <= goldman_iwahori(a, b) + goldman_iwahori(b, c) + 1e-12);
  CHECK(goldman_iwahori(dual_norm(a), dual_norm(b)) == doctest::Approx(goldman_iwahori(a, b)).epsilon(1e-10));
  CHECK_THROWS_AS((void)goldman_iwahori(a, HermitianNorm::identity(2)), Error);
  CHECK(norm_leq(a, a.scaled(2.0)));
  CHECK_FALSE(norm_leq(a.scaled(2.0), a));
}

TEST_CASE("sampled distance") {
  const NormHandle l1 = NormHandle::l1(2), linf = NormHandle::linf(2);
  CHECK(goldman_iwahori_sampled(l1, l1, 1000, 1).lower_bound < 1e-14);
  // ‖v‖₁/‖v‖∞ ranges over [1, 2] in dim 2 for real v and reaches 2 at (1, 1).
  const SampledDistance s = goldman_iwahori_sampled(l1, linf, 20000, 1);
  CHECK(s.lower_bound <= std::log(2.0) + 1e-12);
  CHECK(s.lower_bound >= std::log(2.0) - 1e-3);

  Rng rng = make_stream(8, 0);
  for (Index d = 1; d <= 4; ++d) {
    const HermitianNorm a(random_spd(d, rng)), b(random_spd(d, rng));
    const double exact = goldman_iwahori(a, b);
    const double est =
        goldman_iwahori_sampled(NormHandle::hermitian(a), NormHandle::hermitian(b), 10000, 2).lower_bound;
    CHECK(est <= exact + 1e-12);
    CHECK(est >= 0.95 * exact);
  }
}

TEST_CASE("norm geodesics") {
  Rng rng = make_stream(9, 0);
  const HermitianNorm a(random_spd(3, rng)), b(random_spd(3, rng));
  const GeodesicPath path(a, b);
  CHECK(goldman_iwahori(norm_geodesic(path, 0.0), a) < 1e-10);
  CHECK(goldman_iwahori(norm_geodesic(path, 1.0), b) < 1e-10);
  CHECK((path.transfer_eigenvalues().array() > 0).all());
  const HermitianNorm mid = norm_geodesic(path, 0.5);
  CHECK(goldman_iwahori(mid, a) == doctest::Approx(goldman_iwahori(mid, b)).epsilon(1e-9));
  // Constant speed.
  for (double t : {0.2, 0.7})
    CHECK(goldman_iwahori(a, norm_geodesic(path, t)) == doctest::Approx(t * goldman_iwahori(a, b)).epsilon(1e-9));

  const HermitianNorm m = norm_geodesic(GeodesicPath(HermitianNorm::identity(2), diag({std::exp(2.0), std::exp(4.0)})), 0.5);
  CHECK(m.gram()(0, 0).real() == doctest::Approx(std::exp(1.0)));
  CHECK(m.gram()(1, 1).real() == doctest::Approx(std::exp(2.0)));
  try {
    (void)norm_geodesic(path, 1.5);
    FAIL("extrapolation accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Range);
  }
}

TEST_CASE("contraction interpolation") {
  const HermitianNorm id3 = HermitianNorm::identity(3), id2 = HermitianNorm::identity(2);
  const std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
  const ContractionReport same = check_contraction_interpolation(CMatrix::Identity(3, 3), id3, id3, id3, id3, ts);
  for (double v : same.operator_norms) CHECK(v == doctest::Approx(1.0));
  CMatrix proj = CMatrix::Zero(2, 3);
  proj(0, 0) = proj(1, 1) = 1.0;
  CHECK(check_contraction_interpolation(proj, id3, id3, id2, id2, ts).max_norm() <= 1.0 + 1e-12);

  // Quotient norms at the ends make pi contracting; interpolation keeps it so.
  Rng rng = make_stream(10, 0);
  const HermitianNorm u0(random_spd(3, rng)), u1(random_spd(3, rng));
  const CMatrix pi = random_cmatrix(2, 3, rng);
  const ContractionReport r =
      check_contraction_interpolation(pi, u0, u1, quotient_norm(u0, pi), quotient_norm(u1, pi), ts);
  CHECK(r.max_norm() <= 1.0 + 1e-9);
  try {
    (void)check_contraction_interpolation(pi, u0, u1, quotient_norm(u0, pi).scaled(2.0), quotient_norm(u1, pi), ts);
    FAIL("non-contracting endpoint accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("norm handles") {
  const NormHandle l1 = NormHandle::l1(3), linf = NormHandle::linf(3);
  CVector v(3);
  v << Complex(3, 4), -1.0, 0.0;
  CHECK(l1(v) == doctest::Approx(6.0));
  CHECK(linf(v) == doctest::Approx(5.0));
  CHECK(l1.dual(v) == doctest::Approx(5.0));
  CHECK(std::abs(v.dot(l1.norming(v))) == doctest::Approx(l1(v)));
  l1.check_axioms(1);
  const NormHandle bad = NormHandle::custom(2, [](const CVector& x) { return x.squaredNorm(); });
  try {
    bad.check_axioms(1);
    FAIL("non-homogeneous evaluator accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NormAxiom);
  }
}
