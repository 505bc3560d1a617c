#pragma once

#include <cstdint>
#include <random>

#include "srm/types.hpp"

namespace srm {

using Rng = std::mt19937_64;

/// Independent stream for worker `stream` derived from a master seed.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline CVector random_cvector(Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline CMatrix random_cmatrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

/// Random Hermitian positive-definite matrix  X X^H + shift·I, well conditioned
/// for the desk dimensions used in tests and experiments.
inline CMatrix random_spd(Index n, Rng& rng, double shift = 0.5) {
  CMatrix x = random_cmatrix(n, n, rng);
  CMatrix g = x * x.adjoint() / static_cast<double>(n);
  g += shift * CMatrix::Identity(n, n);
  return 0.5 * (g + g.adjoint());
}

}  // namespace srm
