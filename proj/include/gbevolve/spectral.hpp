#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gbevolve::spectral {

/// Unnormalized real-to-half-complex DFT: X_k = sum_j x_j e^{-2 pi i jk/n}, k = 0..n/2.
std::vector<std::complex<double>> forward(std::span<const double> x);

/// Inverse of forward(), including the 1/n factor.
std::vector<double> inverse(std::span<const std::complex<double>> coeffs, std::size_t n);

}  // namespace gbevolve::spectral
