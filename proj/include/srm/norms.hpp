#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srm/types.hpp"

namespace srm {

inline constexpr double kMaxCondition = 1e14;

/// Hermitian norm  ‖v‖² = v^H G v  on a finite-dimensional coordinate space.
///
/// The gram is basis-relative. Conditioning is measured after Jacobi
/// equilibration  D^{-1/2} G D^{-1/2}  (D = diag G): rescaling basis vectors
/// does not change any distance or quotient computed here, and all internal
/// factorizations run on the equilibrated matrix.
class HermitianNorm {
public:
  HermitianNorm() = default;
  explicit HermitianNorm(CMatrix gram, BasisLabel basis = {});

  static HermitianNorm identity(Index dim, BasisLabel basis = {});
  static HermitianNorm diagonal(const RVector& entries, BasisLabel basis = {});

  [[nodiscard]] Index dim() const { return gram_.rows(); }
  [[nodiscard]] const CMatrix& gram() const { return gram_; }
  [[nodiscard]] const BasisLabel& basis() const { return basis_; }
  [[nodiscard]] double condition_number() const { return condition_; }

  [[nodiscard]] double norm(const CVector& v) const;
  [[nodiscard]] double norm_squared(const CVector& v) const;

  /// The norm multiplied by c > 0 (gram multiplied by c²).
  [[nodiscard]] HermitianNorm scaled(double c) const;
  [[nodiscard]] HermitianNorm relabeled(BasisLabel basis) const;

  /// Lower-triangular L with G = L L^H.
  [[nodiscard]] CMatrix cholesky_factor() const;
  /// Solve G x = b.
  [[nodiscard]] CMatrix solve(const CMatrix& b) const;
  [[nodiscard]] CMatrix inverse_gram() const;
  /// L^{-1} b for the factor above.
  [[nodiscard]] CMatrix whiten(const CMatrix& b) const;

private:
  struct Factor;
  CMatrix gram_;
  BasisLabel basis_;
  double condition_ = 1.0;
  std::shared_ptr<const Factor> factor_;
};

/// General norm given by an evaluator.
enum class NormKind { Hermitian, L1, Linf, Custom };

class NormHandle {
public:
  using Evaluator = std::function<double(const CVector&)>;
  /// Returns φ with dual norm 1 and φ^H v = ‖v‖ (a norming functional).
  using Norming = std::function<CVector(const CVector&)>;

  static NormHandle hermitian(HermitianNorm norm);
  static NormHandle l1(Index dim, std::optional<RVector> weights = std::nullopt);
  static NormHandle linf(Index dim, std::optional<RVector> weights = std::nullopt);
  static NormHandle custom(Index dim, Evaluator evaluate, std::optional<Evaluator> dual = std::nullopt,
                           std::optional<Norming> norming = std::nullopt);

  [[nodiscard]] Index dim() const { return dim_; }
  [[nodiscard]] NormKind kind() const { return kind_; }
  [[nodiscard]] double operator()(const CVector& v) const { return evaluate_(v); }
  [[nodiscard]] bool has_exact_dual() const { return dual_.has_value(); }
  [[nodiscard]] double dual(const CVector& phi) const;
  [[nodiscard]] CVector norming(const CVector& v) const;
  [[nodiscard]] const std::optional<HermitianNorm>& as_hermitian() const { return hermitian_; }
  /// Coordinate weights of an l1 / linf handle.
  [[nodiscard]] const RVector& weights() const { return weights_; }
  /// Dual norm as a handle (available when the dual evaluator is).
  [[nodiscard]] NormHandle dual_handle() const;

  /// Spot-checks homogeneity and definiteness on random vectors; throws NormAxiom.
  void check_axioms(std::uint64_t seed, int trials = 16) const;

private:
  Index dim_ = 0;
  NormKind kind_ = NormKind::Custom;
  Evaluator evaluate_;
  std::optional<Evaluator> dual_;
  std::optional<Norming> norming_;
  std::optional<HermitianNorm> hermitian_;
  RVector weights_;
};

[[nodiscard]] HermitianNorm dual_norm(const HermitianNorm& n);

/// Quotient norm along a surjection proj (rows = target dim):
/// ‖f‖ = min{‖g‖ : proj g = f}, gram (proj G^{-1} proj^H)^{-1}.
[[nodiscard]] HermitianNorm quotient_norm(const HermitianNorm& n, const CMatrix& proj,
                                          BasisLabel target_basis = {});

/// Generalized eigenvalues λ of the pencil (b.gram, a.gram), ascending.
[[nodiscard]] RVector relative_spectrum(const HermitianNorm& a, const HermitianNorm& b);

/// Goldman–Iwahori distance  max |½ log λ|.
[[nodiscard]] double goldman_iwahori(const HermitianNorm& a, const HermitianNorm& b);

/// True when ‖v‖_a ≤ c·‖v‖_b for all v, up to relative slack tol.
[[nodiscard]] bool norm_leq(const HermitianNorm& a, const HermitianNorm& b, double c = 1.0,
                            double tol = 1e-9);

struct SampledDistance {
  double lower_bound = 0.0;  ///< max |log ratio| over the sampled directions
  int samples = 0;
  CVector argmax;
};

/// Sampled lower bound on the Goldman–Iwahori distance of two general norms.
/// Deterministic for a fixed seed; never claimed exact.
[[nodiscard]] SampledDistance goldman_iwahori_sampled(const NormHandle& a, const NormHandle& b,
                                                      int n_samples, std::uint64_t seed);

/// Geodesic t ↦ ⟨A^t ·,·⟩₀ between two Hermitian norms, with ⟨·,·⟩₁ = ⟨A·,·⟩₀.
class GeodesicPath {
public:
  GeodesicPath(HermitianNorm start, HermitianNorm end);

  [[nodiscard]] const HermitianNorm& start() const { return start_; }
  [[nodiscard]] const HermitianNorm& end() const { return end_; }
  /// Eigenvalues of the transfer operator A (ascending, all positive).
  [[nodiscard]] const RVector& transfer_eigenvalues() const { return eigenvalues_; }

private:
  friend HermitianNorm norm_geodesic(const GeodesicPath& path, double t);
  HermitianNorm start_;
  HermitianNorm end_;
  CMatrix frame_;  ///< L U with G0 = L L^H, L^{-1} G1 L^{-H} = U Λ U^H
  RVector eigenvalues_;
};

[[nodiscard]] HermitianNorm norm_geodesic(const GeodesicPath& path, double t);

/// Operator norm of op : (U, from) → (V, to).
[[nodiscard]] double operator_norm(const CMatrix& op, const HermitianNorm& from, const HermitianNorm& to);

struct ContractionReport {
  std::vector<double> t;
  std::vector<double> operator_norms;
  [[nodiscard]] double max_norm() const;
};

/// Operator norm of pi along the geodesics (NU0→NU1, NV0→NV1). Requires pi to
/// contract at both endpoints.
[[nodiscard]] ContractionReport check_contraction_interpolation(const CMatrix& pi, const HermitianNorm& nu0,
                                                                const HermitianNorm& nu1,
                                                                const HermitianNorm& nv0,
                                                                const HermitianNorm& nv1,
                                                                const std::vector<double>& t_grid);

}  // namespace srm
