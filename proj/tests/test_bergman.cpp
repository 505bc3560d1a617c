#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "srm/bergman.hpp"
#include "srm/random.hpp"

using namespace srm;

TEST_CASE("model kernel") {
  CHECK(std::abs(model_kernel(0.0, 0.0) - 1.0) < 1e-15);
  const Complex z(0.3, -0.4);
  CHECK(std::abs(model_kernel(z, z) - 1.0) < 1e-14);
  CHECK(std::abs(model_kernel(z, 0.0)) == doctest::Approx(std::exp(-std::numbers::pi * 0.25 / 2)));
}

TEST_CASE("round kernel closed forms") {
  const MetricOnL round = MetricOnL::round();
  for (int k : {1, 4, 10}) {
    const BergmanEvaluator ev(k, round);
    for (double x : {0.1, 0.5, 0.93}) CHECK(ev.diagonal(Point::from_moment(x, 0.3)) == doctest::Approx(k + 1.0));
    CHECK(ev.diagonal(Point::from_z(0.0)) == doctest::Approx(k + 1.0));
    CHECK(kernel_trace(ev) == doctest::Approx(k + 1.0).epsilon(1e-10));
    // |B(x, y)| = (k+1)|1 + x ȳ|^k / ((1+|x|²)(1+|y|²))^{k/2} for the round weights.
    const Complex a(0.4, 0.2), b(-1.3, 0.5);
    const double expect =
        (k + 1.0) * std::pow(std::abs(1.0 + a * std::conj(b)), k) / std::pow((1 + std::norm(a)) * (1 + std::norm(b)), k / 2.0);
    CHECK(ev.kernel_norm(Point::from_z(a), Point::from_z(b)) == doctest::Approx(expect).epsilon(1e-10));
  }
  const BergmanEvaluator ev(4, round);
  CHECK(ev.kernel_norm(Point::from_z(0.0), Point{std::numeric_limits<double>::infinity(), 0.0}) < 1e-10);
}

TEST_CASE("kernel properties for a toric perturbation") {
  const MetricOnL ramp = make_metric({"ramp", "ramp", {0.3}});
  const BergmanEvaluator ev(6, ramp);
  Rng rng = make_stream(1, 0);
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(Point::from_moment(0.05 + 0.09 * i, 0.7 * i));
  CHECK(reproducing_residual(ev, SectionVector(6, random_cvector(7, rng)), pts) < 1e-7);
  CHECK(kernel_trace(ev) == doctest::Approx(7.0).epsilon(1e-8));
  // Hermitian symmetry and the extremal characterization of the diagonal.
  const Point x = pts[2], y = pts[7];
  CHECK(std::abs(ev.kernel(x, y) - std::conj(ev.kernel(y, x))) < 1e-12);
  const CVector e = ev.weighted_values(x);
  const CVector peak = ev.gram().solve(e.conjugate());
  const double rayleigh = std::norm(e.dot(peak.conjugate())) / ev.gram().norm_squared(peak);
  CHECK(ev.diagonal(x) == doctest::Approx(rayleigh).epsilon(1e-10));
  for (int i = 0; i < 20; ++i) {
    const CVector s = random_cvector(7, rng);
    CHECK(std::norm(e.dot(s.conjugate())) / ev.gram().norm_squared(s) <= ev.diagonal(x) * (1 + 1e-10));
  }
}

TEST_CASE("orthonormal frames give the same diagonal") {
  const MetricOnL ramp = make_metric({"ramp", "ramp", {0.3}});
  const BergmanEvaluator ev(5, ramp);
  Rng rng = make_stream(2, 0);
  const CMatrix u = random_cmatrix(6, 6, rng).householderQr().householderQ();
  const Point p = Point::from_moment(0.3, 1.1);
  const CVector o = ev.orthonormal_values(p);
  CHECK((u * o).squaredNorm() == doctest::Approx(ev.diagonal(p)).epsilon(1e-12));
}

TEST_CASE("near-diagonal residual") {
  const MetricOnL round = MetricOnL::round();
  for (int k : {8, 32}) {
    const BergmanEvaluator ev(k, round);
    const NormalChart chart = NormalChart::at(round, Point::from_moment(0.5));
    CHECK(near_diagonal_residual(ev, chart, 0.0, 0.0) == doctest::Approx(1.0 / k).epsilon(1e-10));
    const Complex z(0.05, 0.03);
    CHECK(near_diagonal_residual(ev, chart, z, z) == doctest::Approx(1.0 / k).epsilon(1e-8));
    try {
      (void)near_diagonal_residual(ev, chart, 0.2, 0.0);
      FAIL("radius not enforced");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Range);
    }
  }
}

TEST_CASE("off-diagonal decay") {
  const DecayFit fit = off_diagonal_decay_scan(MetricOnL::round(), {8, 16});
  CHECK(fit.decays());
  CHECK(fit.doubling_ratio <= 2.0);
  for (const DecayRow& r : fit.rows)
    if (r.dist == 0.0) CHECK(r.log_kernel == doctest::Approx(std::log((r.k + 1.0) / r.k)));
  CHECK_THROWS_AS(off_diagonal_decay_scan(make_metric({"d", "dipole", {0.1}}), {8}), Error);
}

TEST_CASE("projector row integrals") {
  const MetricOnL round = MetricOnL::round();
  CHECK(projector_lp_bound(BergmanEvaluator(0, round)).value == doctest::Approx(1.0).epsilon(1e-10));
  const double r16 = projector_lp_bound(BergmanEvaluator(16, round)).value;
  CHECK(r16 > 1.0);
  CHECK(r16 < 2.5);
  // Round oracle: ∫(k+1)cos^k(d) dv = (k+1)∫₀¹ (1 − x)^{k/2} dx = 2(k+1)/(k+2).
  CHECK(r16 == doctest::Approx(2.0 * 17.0 / 18.0).epsilon(1e-8));
}

TEST_CASE("bernstein-markov ratio") {
  const MetricOnL round = MetricOnL::round();
  CHECK(bernstein_markov_ratio(BergmanEvaluator(9, round)).rho == doctest::Approx(std::sqrt(10.0)));
  const MetricOnL ramp = make_metric({"ramp", "ramp", {0.3}});
  for (int k : {4, 12}) CHECK(bernstein_markov_ratio(BergmanEvaluator(k, ramp)).rho >= std::sqrt(k + 1.0) - 1e-9);
}
