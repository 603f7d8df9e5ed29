#pragma once

#include <span>
#include <vector>

namespace gbevolve {

/// Solves the periodic tridiagonal system
///
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i],  indices mod n,
///
/// so lower[0] couples row 0 to x[n-1] and upper[n-1] couples row n-1 to x[0].
/// Thomas elimination plus a Sherman-Morrison correction for the corners.
/// Requires n >= 3 and a nonsingular (e.g. diagonally dominant) matrix.
std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs);

}  // namespace gbevolve
