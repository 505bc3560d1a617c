#pragma once

#include <cstdint>
#include <vector>

#include "srm/norms.hpp"

namespace srm {

/// Element of V₁ ⊗ ⋯ ⊗ V_r stored row-major: the last factor index runs fastest,
/// so for two factors the multi-index (i, j) sits at i·d₂ + j, matching the
/// ordering of kron(G₁, G₂).
struct TensorElement {
  std::vector<Index> dims;
  CVector coeffs;
  std::vector<BasisLabel> labels;

  TensorElement() = default;
  TensorElement(std::vector<Index> dims, CVector coeffs, std::vector<BasisLabel> labels = {});

  static TensorElement decomposable(const std::vector<CVector>& factors);
  /// Two-factor element with coefficient matrix F (d₁ × d₂).
  static TensorElement from_matrix(const CMatrix& f);

  [[nodiscard]] Index size() const { return coeffs.size(); }
  /// Coefficient matrix of a two-factor element.
  [[nodiscard]] CMatrix as_matrix() const;
};

enum class TensorKind { Hermitian, Injective, Projective };
enum class BoundType { Exact, LowerBound, UpperBound, Estimate };

const char* to_string(BoundType b);

struct TensorNormResult {
  double value = 0.0;
  bool exact = false;
  BoundType bound = BoundType::Exact;
  int starts = 0;  ///< multi-starts used by the heuristic branch
  /// Certified bracket when known (lower ≤ true value ≤ upper).
  double lower = 0.0;
  double upper = 0.0;
};

struct TensorOptions {
  int starts = 32;
  int max_iterations = 500;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
};

[[nodiscard]] HermitianNorm hermitian_tensor(const HermitianNorm& n1, const HermitianNorm& n2);
[[nodiscard]] HermitianNorm hermitian_tensor(const std::vector<HermitianNorm>& factors);

/// Whitened coefficient matrix  L₁^H F conj(L₂)  for Hermitian factors; its
/// Frobenius, spectral and nuclear norms are the Hermitian, injective and
/// projective tensor norms.
[[nodiscard]] CMatrix whitened_coefficients(const CMatrix& f, const HermitianNorm& n1, const HermitianNorm& n2);

[[nodiscard]] TensorNormResult injective_norm(const TensorElement& f, const NormHandle& n1, const NormHandle& n2,
                                              const TensorOptions& opt = {});
[[nodiscard]] TensorNormResult projective_norm(const TensorElement& f, const NormHandle& n1, const NormHandle& n2,
                                               const TensorOptions& opt = {});

struct SandwichReport {
  double injective = 0.0;
  double hermitian = 0.0;  ///< NaN unless both factors are Hermitian
  double projective = 0.0;
  double dim_factor = 0.0;  ///< d₁d₂ / max(d₁, d₂)
  bool exact = false;
  bool holds = false;
};

[[nodiscard]] SandwichReport tensor_norm_sandwich_check(const TensorElement& f, const NormHandle& n1,
                                                        const NormHandle& n2, double tol = 1e-9);

struct DualityReport {
  double projective_dual = 0.0;  ///< π-norm of f for the dual factor norms
  double trace_sup = 0.0;        ///< sup |⟨G, f⟩| over the injective unit ball
  double witness_injective = 0.0;  ///< injective norm of the maximizing G (should be 1)
  double residual = 0.0;
};

[[nodiscard]] DualityReport duality_check(const TensorElement& f, const HermitianNorm& n1, const HermitianNorm& n2);

struct LawsReport {
  double kronecker_associativity = 0.0;  ///< max entry difference
  double quotient_transitivity = 0.0;    ///< Goldman–Iwahori distance between the two quotient grams
  double hermitian_quotient_product = 0.0;  ///< [N₁ ⊗ N₂]_{q₁⊗q₂} vs [N₁]_{q₁} ⊗ [N₂]_{q₂}
  double projective_lift_residual = 0.0;    ///< |π(lift g) − π_quot(g)| / π_quot(g)
  double projective_fiber_min_ratio = 0.0;  ///< min over sampled fiber points of π(f)/π_quot(g), ≥ 1
};

/// Checks (a) Kronecker associativity, (b) transitivity of quotients along
/// full = second ∘ (first ⊗ id₃), and (c) commutation of projective tensor
/// products with factorwise quotients q1, q2. Throws Precondition when `full`
/// does not factor through `first ⊗ id`.
[[nodiscard]] LawsReport assoc_and_quotient_laws_check(const HermitianNorm& n1, const HermitianNorm& n2,
                                                       const HermitianNorm& n3, const CMatrix& first,
                                                       const CMatrix& full, const CMatrix& q1, const CMatrix& q2,
                                                       std::uint64_t seed = 7);

}  // namespace srm
