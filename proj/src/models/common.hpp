#pragma once

#include <string>

#include "phdae/core.hpp"

namespace phdae::detail {

/// Throws ValidationError unless m is square, symmetric and its smallest
/// eigenvalue exceeds `min_eig` (use 0 for SPD, -1e-10 for PSD).
void require_definite(const Matrix& m, const std::string& what, bool strict);

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what);

}  // namespace phdae::detail
