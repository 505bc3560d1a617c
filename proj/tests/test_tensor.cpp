#include <cmath>

#include "doctest.h"
#include "srm/random.hpp"
#include "srm/section_ring.hpp"
#include "srm/tensor.hpp"

using namespace srm;

namespace {

TensorElement identity2() { return TensorElement::from_matrix(CMatrix::Identity(2, 2)); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TEST_CASE("hermitian tensor products") {
  const HermitianNorm id2 = HermitianNorm::identity(2);
  CHECK((hermitian_tensor(id2, id2).gram() - CMatrix::Identity(4, 4)).norm() < 1e-15);
  const HermitianNorm half = HermitianNorm::diagonal(RVector::Constant(2, 0.5));
  CHECK((hermitian_tensor(half, half).gram() - 0.25 * CMatrix::Identity(4, 4)).norm() < 1e-15);

  Rng rng = make_stream(1, 0);
  const HermitianNorm a(random_spd(3, rng)), b(random_spd(2, rng));
  const CVector x = random_cvector(3, rng), y = random_cvector(2, rng);
  const TensorElement f = TensorElement::decomposable({x, y});
  CHECK(hermitian_tensor(a, b).norm(f.coeffs) == doctest::Approx(a.norm(x) * b.norm(y)).epsilon(1e-12));
}

TEST_CASE("injective and projective norms on identity factors") {
  const NormHandle id = NormHandle::hermitian(HermitianNorm::identity(2));
  CHECK(injective_norm(identity2(), id, id).value == doctest::Approx(1.0));
  CHECK(projective_norm(identity2(), id, id).value == doctest::Approx(2.0));
  CHECK(injective_norm(identity2(), id, id).exact);

  Rng rng = make_stream(2, 0);
  const HermitianNorm a(random_spd(3, rng)), b(random_spd(3, rng));
  const CVector x = random_cvector(3, rng), y = random_cvector(3, rng);
  const TensorElement f = TensorElement::decomposable({x, y});
  const double prod = a.norm(x) * b.norm(y);
  CHECK(injective_norm(f, NormHandle::hermitian(a), NormHandle::hermitian(b)).value ==
        doctest::Approx(prod).epsilon(1e-10));
  CHECK(projective_norm(f, NormHandle::hermitian(a), NormHandle::hermitian(b)).value ==
        doctest::Approx(prod).epsilon(1e-10));
}

TEST_CASE("l1, linf and mixed factor laws") {
  Rng rng = make_stream(3, 0);
  for (int t = 0; t < 10; ++t) {
    const CMatrix m = random_cmatrix(3, 2, rng);
    const TensorElement f = TensorElement::from_matrix(m);
    CHECK(projective_norm(f, NormHandle::l1(3), NormHandle::l1(2)).value ==
          doctest::Approx(m.cwiseAbs().sum()).epsilon(1e-12));
    CHECK(injective_norm(f, NormHandle::linf(3), NormHandle::linf(2)).value ==
          doctest::Approx(m.cwiseAbs().maxCoeff()).epsilon(1e-12));
    // l∞ ⊗_ε l² is l∞(l²): the max over rows of the row 2-norms.
    const NormHandle l2 = NormHandle::hermitian(HermitianNorm::identity(2));
    const TensorNormResult r = injective_norm(f, NormHandle::linf(3), l2);
    CHECK(r.value == doctest::Approx(m.rowwise().norm().maxCoeff()).epsilon(1e-8));
  }
}

TEST_CASE("sandwich inequalities") {
  const NormHandle id = NormHandle::hermitian(HermitianNorm::identity(2));
  const SandwichReport s = tensor_norm_sandwich_check(identity2(), id, id);
  CHECK(s.injective == doctest::Approx(1.0));
  CHECK(s.hermitian == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.projective == doctest::Approx(2.0));
  CHECK(s.dim_factor == doctest::Approx(2.0));
  CHECK(s.holds);

  Rng rng = make_stream(4, 0);
  for (int t = 0; t < 200; ++t) {
    const Index d1 = 1 + static_cast<Index>(rng() % 6), d2 = 1 + static_cast<Index>(rng() % 6);
    const HermitianNorm a(random_spd(d1, rng)), b(random_spd(d2, rng));
    const SandwichReport r = tensor_norm_sandwich_check(TensorElement::from_matrix(random_cmatrix(d1, d2, rng)),
                                                        NormHandle::hermitian(a), NormHandle::hermitian(b));
    CHECK(r.holds);
    CHECK(r.exact);
  }
  const TensorElement dec = TensorElement::decomposable({random_cvector(3, rng), random_cvector(2, rng)});
  const SandwichReport d = tensor_norm_sandwich_check(dec, NormHandle::hermitian(HermitianNorm::identity(3)), id);
  CHECK(d.injective == doctest::Approx(d.projective).epsilon(1e-10));
  CHECK(d.hermitian == doctest::Approx(d.projective).epsilon(1e-10));
}

TEST_CASE("nuclear and spectral duality") {
  const DualityReport id = duality_check(identity2(), HermitianNorm::identity(2), HermitianNorm::identity(2));
  CHECK(id.trace_sup == doctest::Approx(2.0));
  CHECK(id.witness_injective == doctest::Approx(1.0));

  const HermitianNorm one = HermitianNorm::diagonal(RVector::Constant(1, 3.0));
  const TensorElement scalar({1, 1}, CVector::Constant(1, Complex(2.0, 0.0)));
  CHECK(duality_check(scalar, one, one).residual < 1e-12);

  Rng rng = make_stream(5, 0);
  for (int t = 0; t < 30; ++t) {
    const Index d1 = 1 + static_cast<Index>(rng() % 5), d2 = 1 + static_cast<Index>(rng() % 5);
    const HermitianNorm a(random_spd(d1, rng)), b(random_spd(d2, rng));
    CHECK(duality_check(TensorElement::from_matrix(random_cmatrix(d1, d2, rng)), a, b).residual < 1e-8);
  }
}

TEST_CASE("associativity and quotient laws") {
  Rng rng = make_stream(6, 0);
  const HermitianNorm id2 = HermitianNorm::identity(2);
  CMatrix q = CMatrix::Zero(1, 2);
  q(0, 0) = 1.0;
  // Identity projections on trivial factors.
  const LawsReport triv = assoc_and_quotient_laws_check(id2, id2, id2, CMatrix::Identity(4, 4), CMatrix::Identity(8, 8), q, q);
  CHECK(triv.kronecker_associativity == 0.0);
  CHECK(triv.quotient_transitivity < 1e-14);

  // Multiplication chain on degree-one Hilbert norms of the round metric.
  const HermitianNorm h1 = HermitianNorm::diagonal(RVector::Constant(2, 0.5), monomial_basis(1));
  const LawsReport chain =
      assoc_and_quotient_laws_check(h1, h1, h1, MultMap(1, 1).matrix, MultMap({1, 1, 1}).matrix, q, q);
  CHECK(chain.quotient_transitivity < 1e-10);
  CHECK(chain.hermitian_quotient_product < 1e-10);
  CHECK(chain.projective_fiber_min_ratio >= 1.0 - 1e-9);

  for (int t = 0; t < 5; ++t) {
    const Index d = 2 + static_cast<Index>(rng() % 3);
    const HermitianNorm a(random_spd(d, rng)), b(random_spd(d, rng)), c(random_spd(d, rng));
    const CMatrix first = random_cmatrix(d, d * d, rng), second = random_cmatrix(2, d * d, rng);
    const CMatrix full = second * kron(first, CMatrix::Identity(d, d));
    const LawsReport r = assoc_and_quotient_laws_check(a, b, c, first, full, random_cmatrix(1, d, rng),
                                                       random_cmatrix(1, d, rng));
    CHECK(r.kronecker_associativity < 1e-12);
    CHECK(r.quotient_transitivity < 1e-9);
    CHECK(r.projective_lift_residual < 1e-6);
  }
}

TEST_CASE("tensor element shape checks") {
  CHECK_THROWS_AS(TensorElement({2, 2}, CVector::Zero(3)), Error);
  const NormHandle l1 = NormHandle::l1(2);
  CHECK_THROWS_AS((void)injective_norm(identity2(), l1, NormHandle::l1(3)), Error);
}
