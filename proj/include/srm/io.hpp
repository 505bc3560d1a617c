#pragma once

#include <string>

#include "srm/norms.hpp"

namespace srm {

/// {"dim": n, "basis_label": {"name", "degree"}, "gram": [[re, im], ...]} with
/// the gram stored row-major.
std::string to_json(const HermitianNorm& n);
HermitianNorm hermitian_norm_from_json(const std::string& text);

}  // namespace srm
