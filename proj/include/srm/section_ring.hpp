#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "srm/geometry.hpp"
#include "srm/tensor.hpp"

namespace srm {

/// Polynomial product; degrees add.
SectionVector multiply(const SectionVector& f, const SectionVector& g);

/// 0/1 matrix of Mult_{k₁,…,k_r}: V_{k₁} ⊗ ⋯ ⊗ V_{k_r} → V_{Σk_i}, tensor
/// coefficients ordered row-major (last factor fastest).
struct MultMap {
  std::vector<int> degrees;
  CMatrix matrix;

  explicit MultMap(std::vector<int> degrees);
  MultMap(int k, int l) : MultMap(std::vector<int>{k, l}) {}
  [[nodiscard]] int target_degree() const;
};

/// [N_k ⊗ N_l] on degree k + l: quotient of the Hermitian tensor norm along
/// Mult_{k,l}. Uses (M (G_k⁻¹ ⊗ G_l⁻¹) M^H)_{cc'} = Σ G_k⁻¹[a,a'] G_l⁻¹[c−a, c'−a'].
HermitianNorm quotient_tensor_norm(const HermitianNorm& nk, const HermitianNorm& nl, int k, int l);
/// Iterated quotient [N_{k₁} ⊗ ⋯ ⊗ N_{k_r}].
HermitianNorm quotient_tensor_norm(const std::vector<HermitianNorm>& norms, const std::vector<int>& degrees);

/// Degree-indexed Hilb_k(h) grams, computed on demand and memoized.
class HilbertFamily {
public:
  explicit HilbertFamily(MetricOnL h, QuadratureScheme scheme = {}) : h_(std::move(h)), scheme_(scheme) {}
  const HermitianNorm& operator()(int k);
  [[nodiscard]] const MetricOnL& metric() const { return h_; }

private:
  MetricOnL h_;
  QuadratureScheme scheme_;
  std::map<int, HermitianNorm> cache_;
};

struct IsometryRatio {
  int k = 0, l = 0;
  double gi_distance = 0.0;         ///< d([Hilb_k ⊗ Hilb_l], Hilb_{k+l})
  double scaled_gi_distance = 0.0;  ///< after scaling the quotient norm by (kl/(k+l))^{n/2}
};

IsometryRatio asym_isometry_ratio(int k, int l, HilbertFamily& hilb, int n = 1);

struct BanachIsometryRatio {
  int k = 0, l = 0;
  int probes = 0;
  // L∞ branch: [Ban∞_k ⊗_ε Ban∞_l](f) / Ban∞_{k+l}(f) lies in [linf_lower, linf_upper].
  double linf_lower = 1.0;
  double linf_upper = 0.0;
  double mult_ratio_max = 0.0;  ///< max ‖fg‖∞/(‖f‖∞‖g‖∞) over sampled pairs
  // L¹ branch: normalized ratio [Ban¹ ⊗_π Ban¹](f)/Ban¹(f)·(kl/(k+l))ⁿ/2ⁿ.
  double l1_lower = 0.0;
  double l1_upper = 0.0;
  bool estimate = true;
};

struct BanachProbeOptions {
  int random_probes = 3;
  int peak_probes = 3;
  int pair_samples = 16;
  int sup_grid = 20;     ///< moment and angle nodes per factor of the X × X sup grid
  int l1_radial = 12;    ///< moment nodes per factor for the L¹(X × X) fiber minimization
  bool l1_full_fiber = true;  ///< minimize over the whole fiber for non-monomial probes
  std::uint64_t seed = 11;
};

/// Sampled two-sided estimates of the L¹/L∞ asymptotic isometry ratios
/// (toric or round metrics).
BanachIsometryRatio l1_linf_isometry_ratio(int k, int l, HilbertFamily& hilb, const BanachProbeOptions& opt = {},
                                           int n = 1);

/// A_{k,l} = Mult ∘ Mult* with adjoints for the Hilbert norms:
/// M (G_k⁻¹ ⊗ G_l⁻¹) M^H G_{k+l}.
CMatrix multiplicative_defect(int k, int l, HilbertFamily& hilb);

/// Operator norm, w.r.t. Hilb_{k+l}, of A − c·Id (A self-adjoint for that norm).
double defect_deviation(const CMatrix& a, const HermitianNorm& target, double c);

/// Minimal-norm preimage of f under Mult_{k,l} for Hilb_k ⊗ Hilb_l.
TensorElement optimal_decomposition(const SectionVector& f, int k, int l, HilbertFamily& hilb);
TensorElement optimal_decomposition(const SectionVector& f, const HermitianNorm& nk, const HermitianNorm& nl, int k,
                                    int l);

struct GradedNorm {
  std::map<int, HermitianNorm> pieces;
  std::function<double(int)> budget;
  std::string provenance = "custom";

  [[nodiscard]] const HermitianNorm& at(int k) const;
};

GradedNorm hilbert_graded_norm(HilbertFamily& hilb, int kmax, int kmin = 1);

/// f(k) = (n/2)·log k + 2 + log dim H⁰(P¹, O(k)).
double mult_gen_budget(int k, int n = 1);

struct MultGenViolation {
  std::vector<int> parts;
  int degree = 0;
  double distance = 0.0;
  double budget = 0.0;
};

struct MultGenReport {
  int checked = 0;
  double max_excess = 0.0;  ///< max of distance − budget
  std::vector<MultGenViolation> violations;
  /// Only the upper side ‖·‖_{N_k} ≤ e^{budget}[⊗]: distances signed that way.
  int one_sided_violations = 0;
};

/// Exhaustive unordered partitions for r ∈ {2, 3} ∩ r_set (parts ≥ p0, sum ≤ kmax)
/// plus `random_samples` random partitions with 4 ≤ r ≤ 6 when r_set allows.
MultGenReport check_mult_generated(const GradedNorm& n, int p0, int kmax, const std::vector<int>& r_set,
                                   int random_samples = 64, std::uint64_t seed = 3);

struct GradedDistance {
  std::vector<int> degrees;
  std::vector<double> scaled;  ///< (1/k)·d_∞(N_k, N'_k)
  double last = 0.0;
  double tail_max = 0.0;  ///< max over the upper half of the scan
  double slope = 0.0;     ///< least-squares slope of scaled vs 1/k
  double limit = 0.0;     ///< intercept of that fit (1/k → 0)
};

GradedDistance graded_equivalence_distance(const GradedNorm& a, const GradedNorm& b, const std::vector<int>& degrees);

/// Least-squares line y ≈ c₀ + c₁ x; returns {c₀, c₁}.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace srm
