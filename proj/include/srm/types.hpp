#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace srm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  IllConditioned,
  NotSurjective,
  DimensionMismatch,
  Range,
  Precondition,
  Accuracy,
  Unsupported,
  NormAxiom,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI)
/// can report structured diagnostics.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IllConditioned: return "ill-conditioned";
    case ErrorKind::NotSurjective: return "not surjective";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Range: return "range";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::NormAxiom: return "norm axiom violation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "error";
}

/// Column of a basis-relative coordinate space. Norms that are exchanged between
/// modules always travel with the label of the basis their gram refers to.
struct BasisLabel {
  std::string name = "coords";
  int degree = -1;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
  [[nodiscard]] std::string str() const {
    return degree < 0 ? name : name + "(" + std::to_string(degree) + ")";
  }
};

inline BasisLabel monomial_basis(int degree) { return {"monomial", degree}; }

/// Element of H⁰(P¹, O(k)): coefficient a multiplies x^a y^{k−a}, i.e. z^a in
/// the affine chart z = x/y.
struct SectionVector {
  int degree = 0;
  CVector coeffs;

  SectionVector() : coeffs(CVector::Zero(1)) {}
  SectionVector(int k, CVector c) : degree(k), coeffs(std::move(c)) {
    if (k < 0 || coeffs.size() != k + 1)
      throw Error(ErrorKind::DimensionMismatch, "section of degree " + std::to_string(k) + " needs " +
                                                    std::to_string(k + 1) + " coefficients");
  }
  static SectionVector monomial(int k, int a) {
    CVector c = CVector::Zero(k + 1);
    c(a) = 1.0;
    return {k, c};
  }
};

}  // namespace srm
