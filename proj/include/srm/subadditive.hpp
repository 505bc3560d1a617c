#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace srm {

enum class Direction { Sub, Super, Both };

/// Values a_k on 1..K with optional budgets f_k (sub side) and g_k (super side).
struct SequenceSample {
  std::map<int, double> values;
  std::function<double(int)> budget;        ///< f; empty means 0
  std::function<double(int)> super_budget;  ///< g; empty means 0
  Direction direction = Direction::Sub;

  [[nodiscard]] int last() const;
  [[nodiscard]] double f(int k) const { return budget ? budget(k) : 0.0; }
  [[nodiscard]] double g(int k) const { return super_budget ? super_budget(k) : 0.0; }
  /// f(k)/k over the sample, for inspecting the o(k) tail.
  [[nodiscard]] std::map<int, double> budget_ratio() const;
};

struct AdditivityViolation {
  std::vector<int> parts;
  int k = 0;
  bool super = false;  ///< violates the super-additive side
  double excess = 0.0;
};

struct AdditivityReport {
  int checked = 0;
  std::vector<AdditivityViolation> violations;
  double max_excess = 0.0;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// a_k ≤ Σa_{k_i} + Σf(k_i) + f(k) (and the reversed inequality with g on the
/// super side), exhaustive over partitions with parts ≥ p0 for r ∈ {2, 3},
/// sampled for 4 ≤ r ≤ 6.
AdditivityReport check_almost_subadditive(const SequenceSample& s, int p0, const std::vector<int>& r_set,
                                          int random_samples = 256, std::uint64_t seed = 5);

/// max over m, n ≥ 1 with m + n ≤ K of a_{m+n} − a_m − a_n − g(m + n).
double bruijn_erdos_excess(const SequenceSample& s, const std::function<double(int)>& g);

struct FeketeEstimate {
  double estimate = 0.0;  ///< a_K/K
  double lower = 0.0;     ///< −∞ unless super-additive
  double upper = 0.0;     ///< +∞ unless sub-additive
  double width = 0.0;
  bool low_confidence = false;  ///< K < 8
};

/// Upper end min_k (a_k + f_k)/k, lower end max_k (a_k − g_k)/k, over k ≥ p0.
FeketeEstimate fekete_limit(const SequenceSample& s, int p0 = 1);

/// Values a_k(x_j) on a fixed ordered grid, one row per k.
struct FunctionFamilySample {
  std::vector<double> grid;
  std::map<int, std::vector<double>> values;
  std::function<double(int, std::size_t)> budget;        ///< f_k(x_j)
  std::function<double(int, std::size_t)> super_budget;  ///< g_k(x_j)
};

struct UniformReport {
  bool direction_ok = true;
  int failing_point = -1;
  std::map<int, double> deviation;  ///< sup_j |a_k(x_j)/k − a(x_j)|
  bool decreasing = true;
  double modulus = 0.0;  ///< max |a(x_{j+1}) − a(x_j)| of the limit estimate
  std::vector<double> limit;
};

UniformReport uniform_convergence_check(const FunctionFamilySample& fam, int p0 = 1);

}  // namespace srm
