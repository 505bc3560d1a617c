#include "srm/subadditive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "srm/types.hpp"

namespace srm {

int SequenceSample::last() const {
  if (values.empty()) throw Error(ErrorKind::Range, "empty sequence");
  return values.rbegin()->first;
}

std::map<int, double> SequenceSample::budget_ratio() const {
  std::map<int, double> out;
  for (const auto& [k, v] : values) out[k] = f(k) / k;
  return out;
}

AdditivityReport check_almost_subadditive(const SequenceSample& s, int p0, const std::vector<int>& r_set,
                                          int random_samples, std::uint64_t seed) {
  AdditivityReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  const int kmax = s.last();
  auto a = [&](int k) {
    auto it = s.values.find(k);
    if (it == s.values.end()) throw Error(ErrorKind::Range, "sequence has no value at " + std::to_string(k));
    return it->second;
  };
  const bool sub = s.direction != Direction::Super;
  const bool super = s.direction != Direction::Sub;
  auto check = [&](const std::vector<int>& parts) {
    const int k = std::accumulate(parts.begin(), parts.end(), 0);
    double sum = 0.0, fsum = s.f(k), gsum = s.g(k);
    for (int p : parts) {
      sum += a(p);
      fsum += s.f(p);
      gsum += s.g(p);
    }
    ++rep.checked;
    if (sub) {
      const double excess = a(k) - sum - fsum;
      rep.max_excess = std::max(rep.max_excess, excess);
      if (excess > 1e-12 * (1.0 + std::abs(a(k)))) rep.violations.push_back({parts, k, false, excess});
    }
    if (super) {
      const double excess = sum - a(k) - gsum;
      rep.max_excess = std::max(rep.max_excess, excess);
      if (excess > 1e-12 * (1.0 + std::abs(a(k)))) rep.violations.push_back({parts, k, true, excess});
    }
  };
  auto allowed = [&](int r) { return std::find(r_set.begin(), r_set.end(), r) != r_set.end(); };
  if (allowed(2))
    for (int x = p0; 2 * x <= kmax; ++x)
      for (int y = x; x + y <= kmax; ++y) check({x, y});
  if (allowed(3))
    for (int x = p0; 3 * x <= kmax; ++x)
      for (int y = x; x + 2 * y <= kmax; ++y)
        for (int z = y; x + y + z <= kmax; ++z) check({x, y, z});
  std::vector<int> big;
  for (int r : r_set)
    if (r >= 4 && r <= 6 && r * p0 <= kmax) big.push_back(r);
  if (!big.empty()) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_samples; ++i) {
      const int r = big[rng() % big.size()];
      const int k = r * p0 + static_cast<int>(rng() % static_cast<std::uint64_t>(kmax - r * p0 + 1));
      std::vector<int> parts(static_cast<std::size_t>(r), p0);
      for (int extra = k - r * p0; extra > 0; --extra) ++parts[rng() % parts.size()];
      check(parts);
    }
  }
  if (rep.checked == 0) rep.max_excess = 0.0;
  return rep;
}

double bruijn_erdos_excess(const SequenceSample& s, const std::function<double(int)>& g) {
  const int kmax = s.last();
  double worst = -std::numeric_limits<double>::infinity();
  for (int m = 1; 2 * m <= kmax; ++m)
    for (int n = m; m + n <= kmax; ++n)
      worst = std::max(worst, s.values.at(m + n) - s.values.at(m) - s.values.at(n) - g(m + n));
  return worst;
}

FeketeEstimate fekete_limit(const SequenceSample& s, int p0) {
  if (s.direction == Direction::Both && (!s.budget || !s.super_budget))
    throw Error(ErrorKind::Precondition, "both-sided Fekete bracket needs both budgets");
  constexpr double inf = std::numeric_limits<double>::infinity();
  FeketeEstimate e;
  const int kmax = s.last();
  e.estimate = s.values.at(kmax) / kmax;
  e.low_confidence = kmax < 8;
  e.lower = -inf;
  e.upper = inf;
  for (const auto& [k, v] : s.values) {
    if (k < p0) continue;
    if (s.direction != Direction::Super) e.upper = std::min(e.upper, (v + s.f(k)) / k);
    if (s.direction != Direction::Sub) e.lower = std::max(e.lower, (v - s.g(k)) / k);
  }
  e.width = e.upper - e.lower;
  return e;
}

UniformReport uniform_convergence_check(const FunctionFamilySample& fam, int p0) {
  UniformReport rep;
  if (fam.values.empty()) throw Error(ErrorKind::Range, "empty family");
  const std::size_t n = fam.grid.size();
  for (const auto& [k, row] : fam.values)
    if (row.size() != n) throw Error(ErrorKind::DimensionMismatch, "grid differs at degree " + std::to_string(k));
  for (std::size_t j = 0; j < n && rep.direction_ok; ++j) {
    SequenceSample s;
    s.direction = Direction::Both;
    for (const auto& [k, row] : fam.values) s.values[k] = row[j];
    if (fam.budget) s.budget = [&, j](int k) { return fam.budget(k, j); };
    if (fam.super_budget) s.super_budget = [&, j](int k) { return fam.super_budget(k, j); };
    if (!check_almost_subadditive(s, p0, {2}).ok()) {
      rep.direction_ok = false;
      rep.failing_point = static_cast<int>(j);
    }
  }
  const auto& [kmax, top] = *fam.values.rbegin();
  rep.limit.resize(n);
  for (std::size_t j = 0; j < n; ++j) rep.limit[j] = top[j] / kmax;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [k, row] : fam.values) {
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j) sup = std::max(sup, std::abs(row[j] / k - rep.limit[j]));
    rep.deviation[k] = sup;
    if (sup > prev + 1e-12) rep.decreasing = false;
    prev = sup;
  }
  for (std::size_t j = 0; j + 1 < n; ++j) rep.modulus = std::max(rep.modulus, std::abs(rep.limit[j + 1] - rep.limit[j]));
  return rep;
}

}  // namespace srm
