#include <cmath>
#include <numbers>

#include "doctest.h"
#include "srm/subadditive.hpp"
#include "srm/types.hpp"

using namespace srm;

namespace {

SequenceSample sample(int kmax, double (*a)(int)) {
  SequenceSample s;
  for (int k = 1; k <= kmax; ++k) s.values[k] = a(k);
  return s;
}

double sqrt_family(int k) { return 3.0 * k + 2.0 * std::sqrt(double(k)); }
double square(int k) { return double(k) * k; }
double linear(int k) { return 1.25 * k; }
double loglog(int k) { return k * std::log(std::log(k + std::numbers::e)); }

}  // namespace

TEST_CASE("sub-additivity checks") {
  const AdditivityReport ok = check_almost_subadditive(sample(40, sqrt_family), 1, {2, 3, 4});
  CHECK(ok.ok());
  CHECK(ok.checked > 0);

  const AdditivityReport bad = check_almost_subadditive(sample(30, square), 1, {2, 3});
  CHECK(bad.violations.size() == static_cast<std::size_t>(bad.checked));

  // A budget large enough absorbs the square's excess 2xy ≤ k²/2.
  SequenceSample s = sample(30, square);
  s.budget = [](int k) { return 0.5 * k * k; };
  CHECK(check_almost_subadditive(s, 1, {2}).ok());
}

TEST_CASE("super-additive direction") {
  SequenceSample s = sample(30, square);
  s.direction = Direction::Super;
  CHECK(check_almost_subadditive(s, 1, {2, 3}).ok());
  s.direction = Direction::Both;
  CHECK_FALSE(check_almost_subadditive(s, 1, {2}).ok());
}

TEST_CASE("fekete brackets") {
  SequenceSample lin = sample(32, linear);
  const FeketeEstimate e = fekete_limit(lin);
  CHECK(e.estimate == doctest::Approx(1.25));
  CHECK(e.upper == doctest::Approx(1.25));
  CHECK_FALSE(e.low_confidence);
  CHECK(fekete_limit(sample(4, linear)).low_confidence);

  double prev = 1e300;
  for (int kmax : {16, 64, 256}) {
    SequenceSample s = sample(kmax, sqrt_family);
    s.direction = Direction::Both;
    s.budget = s.super_budget = [](int k) { return 2.0 * std::sqrt(double(k)); };
    const FeketeEstimate f = fekete_limit(s);
    CHECK(f.lower <= 3.0 + 1e-12);
    CHECK(f.upper >= 3.0 - 1e-12);
    CHECK(f.width < prev);
    prev = f.width;
  }
  SequenceSample one_budget = sample(16, linear);
  one_budget.direction = Direction::Both;
  one_budget.budget = [](int) { return 1.0; };
  CHECK_THROWS_AS(fekete_limit(one_budget), Error);
}

TEST_CASE("weak condition negative control") {
  SequenceSample s = sample(1024, loglog);
  CHECK(bruijn_erdos_excess(s, [](int n) { return n / std::log(n + std::numbers::e); }) <= 0.0);
  s.budget = [](int k) { return std::sqrt(double(k)); };
  CHECK_FALSE(check_almost_subadditive(s, 1, {2}).ok());
}

TEST_CASE("uniform convergence of function families") {
  FunctionFamilySample exact;
  exact.grid = {0.0, 0.5, 1.0};
  for (int k = 1; k <= 16; ++k) exact.values[k] = {0.0, 2.0 * k, -1.0 * k};
  const UniformReport e = uniform_convergence_check(exact);
  CHECK(e.direction_ok);
  for (const auto& [k, d] : e.deviation) CHECK(d == doctest::Approx(0.0).epsilon(1e-14));

  // k·g + √k·h: deviation ≈ ‖h‖∞·|1/√k − 1/√K|.
  FunctionFamilySample f;
  for (int j = 0; j <= 10; ++j) f.grid.push_back(j / 10.0);
  for (int k = 1; k <= 64; ++k) {
    std::vector<double> row;
    for (double x : f.grid) row.push_back(k * x * x + std::sqrt(double(k)) * std::cos(3 * x));
    f.values[k] = row;
  }
  f.budget = f.super_budget = [](int k, std::size_t) { return 2.0 * std::sqrt(double(k)); };
  const UniformReport r = uniform_convergence_check(f);
  CHECK(r.direction_ok);
  CHECK(r.decreasing);
  CHECK(r.deviation.at(4) == doctest::Approx(0.5 - 0.125).epsilon(1e-9));

  FunctionFamilySample g = f;
  g.budget = g.super_budget = nullptr;
  const UniformReport bad = uniform_convergence_check(g);
  CHECK_FALSE(bad.direction_ok);
  CHECK(bad.failing_point >= 0);
}
