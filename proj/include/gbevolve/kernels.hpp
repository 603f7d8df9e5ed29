#pragma once

#include <span>

namespace gbevolve::kernels {

// Dense Toeplitz product y_i = sum_j table[i - j + n - 1] * x_j, n = x.size(),
// table.size() == 2n - 1. This is the O(n^2) core of the direct stress
// quadrature.
//
// Both variants accumulate each y_i in the same order (j ascending), so their
// outputs are bitwise identical; the serial one is kept as the reference the
// parallel one is tested against.

void toeplitz_apply_serial(std::span<const double> table, std::span<const double> x, std::span<double> y);

void toeplitz_apply_parallel(std::span<const double> table, std::span<const double> x, std::span<double> y);

/// Threads the parallel kernels would use right now (1 inside a nested region).
int available_threads();

}  // namespace gbevolve::kernels
