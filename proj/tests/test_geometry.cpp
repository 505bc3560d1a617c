#include <cmath>
#include <numbers>

#include "doctest.h"
#include "srm/geometry.hpp"
#include "srm/quadrature.hpp"
#include "srm/random.hpp"

using namespace srm;

namespace {

double round_entry(int k, int a) {
  return std::exp(std::lgamma(a + 1.0) + std::lgamma(k - a + 1.0) - std::lgamma(k + 2.0));
}

// Independent 1-D oracle for a toric Hilbert gram entry: with x = e^s/(1 + e^s),
//   ∫|z^a|² e^{−kΦ(s)} dμ = ∫₀¹ exp(a s(x) − k Φ(s(x))) dx  for the FS moment measure
// rewritten through the symbol's own moment map x = Φ'(s). Composite Simpson in s.
double toric_entry_oracle(const ToricSymbol& sym, int k, int a) {
  const int n = 40000;
  const double lo = -60.0, hi = 60.0, h = (hi - lo) / n;
  auto f = [&](double s) {
    // dμ = Φ''(s) ds, with Φ'' by central differences of dphi.
    const double d2 = (sym.dphi(s + 1e-5) - sym.dphi(s - 1e-5)) / 2e-5;
    return std::exp(a * s - k * sym.phi(s)) * d2;
  };
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("gauss-legendre rule") {
  const GaussRule& r = gauss_legendre(12);
  double w = 0.0, x4 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    w += r.weights[i];
    x4 += r.weights[i] * std::pow(r.nodes[i], 4);
  }
  CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x4 == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("point coordinates") {
  const Point p = Point::from_z(Complex(0.6, -0.8));
  CHECK(p.s == doctest::Approx(0.0));
  CHECK(std::abs(p.z() - Complex(0.6, -0.8)) < 1e-14);
  CHECK(Point::from_moment(0.5).s == doctest::Approx(0.0));
  CHECK(Point::from_z(0.0).is_pole());
}

TEST_CASE("round hilbert gram") {
  for (int k : {0, 1, 5, 12, 30}) {
    const HermitianNorm g = quadrature_gram(k, MetricOnL::round());
    for (int a = 0; a <= k; ++a)
      CHECK(g.gram()(a, a).real() == doctest::Approx(round_entry(k, a)).epsilon(1e-10));
    CHECK((g.gram() - CMatrix(g.gram().diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(quadrature_gram(0, MetricOnL::round()).gram()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("toric gram against an independent 1-D quadrature") {
  const SymbolPtr ramp = ramp_symbol(0.3);
  const MetricOnL h = MetricOnL::toric(ramp, "ramp");
  for (int k : {1, 4, 9}) {
    const HermitianNorm g = quadrature_gram(k, h);
    for (int a = 0; a <= k; ++a)
      CHECK(g.gram()(a, a).real() == doctest::Approx(toric_entry_oracle(*ramp, k, a)).epsilon(1e-7));
  }
}

TEST_CASE("smooth metrics use the two-dimensional rule") {
  const MetricOnL dip = make_metric({"dipole", "dipole", {0.1}});
  const HermitianNorm g = quadrature_gram(3, dip);
  CHECK(g.dim() == 4);
  CHECK(ma_volume(dip).total_mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sup and L1 norms") {
  const MetricOnL round = MetricOnL::round();
  // |x^k|² e^{−kφ} = (|z|²/(1 + |z|²))^k attains 1 at the pole z = ∞.
  const SupEstimate s = linf_norm(SectionVector::monomial(6, 6), round);
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));

  Rng rng = make_stream(1, 0);
  for (int t = 0; t < 10; ++t) {
    const SectionVector f(4, random_cvector(5, rng));
    const double linf = linf_norm(f, round).value;
    const double l2 = quadrature_gram(4, round).norm(f.coeffs);
    CHECK(l1_norm(f, round) <= linf * (1 + 1e-9));
    CHECK(l2 <= linf * (1 + 1e-9));
  }
}

TEST_CASE("psh validation") {
  CHECK(psh_validate(MetricOnL::round()).ok);
  CHECK(psh_validate(make_metric({"ma", "max-affine", {0.0, 0.0, 1.0, -0.2}})).ok);
  // φ'' = σ(1 − σ) + u'' = 1/4 − 1 at s = 0.
  const MetricOnL bump =
      MetricOnL::smooth([](const Point& p) { return p.is_pole() ? 0.0 : 0.5 * std::exp(-p.s * p.s); }, "bump");
  const PshReport r = psh_validate(bump);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.offending.empty());
}

TEST_CASE("metric distances") {
  const MetricOnL round = MetricOnL::round();
  CHECK(metric_distance(round, round).value == 0.0);
  const MetricOnL shifted = MetricOnL::smooth([](const Point&) { return 0.4; }, "shift");
  CHECK(metric_distance(round, shifted).value == doctest::Approx(0.2));
  const MetricOnL ramp = make_metric({"ramp", "ramp", {0.3}});
  CHECK(metric_distance(round, ramp).value == doctest::Approx(0.15).epsilon(1e-6));
}

TEST_CASE("toric geodesics") {
  const MetricOnL round = MetricOnL::round();
  const MetricOnL ramp = make_metric({"ramp", "ramp", {0.3}});
  CHECK(metric_distance(toric_geodesic(round, ramp, 0.0), round).value < 1e-12);
  CHECK(metric_distance(toric_geodesic(round, ramp, 1.0), ramp).value < 1e-12);
  CHECK(metric_distance(toric_geodesic(ramp, ramp, 0.4), ramp).value < 1e-12);
  // Adding a linear function to the symbol commutes with the Legendre transform,
  // so the geodesic interpolates weights linearly.
  const MetricOnL a = make_metric({"a", "max-affine", {0.0, 0.0, 1.0, 0.0}});
  const MetricOnL b = make_metric({"b", "max-affine", {0.0, 0.2, 1.0, 0.2}});
  for (double t : {0.25, 0.5}) {
    const MetricOnL g = toric_geodesic(a, b, t);
    for (double s : {-3.0, 0.0, 2.0}) CHECK(g.u({s, 0.0}) == doctest::Approx((1 - t) * a.u({s, 0.0}) + t * b.u({s, 0.0})));
  }
}

TEST_CASE("monge-ampere volumes") {
  CHECK(ma_volume(MetricOnL::round()).total_mass == doctest::Approx(1.0).epsilon(1e-10));
  // Piecewise-affine symbols put all mass in atoms at the kinks, one per slope jump.
  const VolumeForm v = ma_volume(make_metric({"ma", "max-affine", {0.0, 0.0, 0.5, 0.3, 1.0, 0.0}}));
  CHECK(v.total_mass == doctest::Approx(1.0).epsilon(1e-10));
  double atoms = 0.0;
  for (const auto& [s, m] : v.atoms) atoms += m;
  CHECK(atoms == doctest::Approx(1.0).epsilon(1e-10));
  const VolumeForm mixed = ma_volume(make_metric({"mixed", "mixed", {0.5}}));
  CHECK(mixed.total_mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mixed.continuous_mass > 0.0);
  CHECK(mixed.continuous_mass < 1.0);
}

TEST_CASE("metric catalog rejects bad entries") {
  CHECK_THROWS_AS(make_metric({"x", "nonsense", {}}), Error);
  CHECK_THROWS_AS(make_metric({"x", "ramp", {}}), Error);
  CHECK_THROWS_AS(make_metric({"x", "ramp", {2.0}}), Error);
}
