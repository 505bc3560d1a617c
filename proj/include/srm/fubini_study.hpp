#pragma once

#include <cstdint>
#include <vector>

#include "srm/geometry.hpp"

namespace srm {

/// FS(N_k): the metric on O(k) for which an N_k-orthonormal basis {s_i} has
/// Σ|s_i|² = 1 pointwise. Stored relative to the round metric:
/// r(p) = log Σ_i |s_i(p)|²_{FS^k}, so the chart weight is kφ_FS + r.
struct FSMetric {
  int k = 1;
  HermitianNorm source;

  [[nodiscard]] double relative_weight(const Point& p) const;
};

FSMetric fs_metric(const HermitianNorm& n, int k);

/// FS(N_k)^{1/k} as a metric on O(1): toric when the gram is diagonal in the
/// monomial basis, a smooth perturbation u = r/k otherwise.
MetricOnL fs_root(const HermitianNorm& n, int k);

struct TianRow {
  int k = 0;
  double deviation = 0.0;  ///< ½ sup |u(fs_root(Hilb_k(h))) − u(h)|
};

std::vector<TianRow> tian_convergence_scan(const MetricOnL& h, const std::vector<int>& degrees,
                                           const QuadratureScheme& scheme = {});

/// sup over a grid of |r_k + r_l − r_{[N_k ⊗ N_l]}|.
double segre_identity_check(const HermitianNorm& nk, const HermitianNorm& nl, int k, int l, int grid = 48);

struct MonotonicityReport {
  bool holds = true;
  double min_gap = 0.0;  ///< min over the grid of r_N − r_{N'} + 2k log c (≥ 0 when FS(N) ≤ c^k FS(N'))
};

/// Requires N ≤ c^k N' (checked by generalized eigenvalues; throws Precondition).
MonotonicityReport fs_monotonicity_check(const HermitianNorm& n, const HermitianNorm& np, double c, int k,
                                         int grid = 48);

/// Degree-k norm, k even: monomials orthogonal, ‖x^{k/2} y^{k/2}‖ = 1, the
/// other entries those of Hilb_k(round).
HermitianNorm counterexample_norm(int k);

/// (2m+1)!/(m!·m!) in exact integer arithmetic; m ≤ 30.
std::uint64_t counterexample_middle_ratio(int m);

/// (C(2m, m) − 1)·|ab|^m/(|a| + |b|)^{2m}, taken literally.
double counterexample_deviation_formula(int m, Complex a, Complex b);
/// 1 − FS(Hilb_{2m})/FS(H_{2m}) at the point with homogeneous coordinates (a, b),
/// from the FS weights of both norms.
double counterexample_deviation_direct(int m, Complex a, Complex b);

struct LempertPair {
  double delta = 1.0;
  CMatrix basis;  ///< columns s₁, s₂, s₃ in the monomial basis of degree 2
  HermitianNorm h;
  HermitianNorm hprime;
};

LempertPair lempert_pair(double delta);
/// FS(H_δ)/FS(H'_δ) at p from the two FS weights.
double lempert_fs_ratio(const LempertPair& pair, const Point& p);
/// (4|s₁|² + ¼|s₂|² + |s₃|²)/(|s₁|² + |s₂|² + |s₃|²) at p.
double lempert_ratio_formula(const LempertPair& pair, const Point& p);
/// sup over a grid of |FS ratio − 1|.
double lempert_sup_deviation(const LempertPair& pair, int grid = 64);

struct InductiveRow {
  int k = 0;
  double distance = 0.0;  ///< d_∞(H_k, Hilb_k(FS(H₁)))
  double scaled = 0.0;    ///< distance / k
  /// max relative entry error of Hilb_k(FS(H₁)) = k!/(k+1)!·H_k at the gram level
  double factor_residual = 0.0;
};

std::vector<InductiveRow> inductive_hilbert_scan(const HermitianNorm& h1, const std::vector<int>& degrees,
                                                 const QuadratureScheme& scheme = {});

/// Points of the moment × angle grid used by the FS checks (poles included once).
std::vector<Point> fs_grid(int grid);

}  // namespace srm
