#include "gbevolve/kernels.hpp"

#include <omp.h>

#include <cstddef>
#include <stdexcept>

namespace gbevolve::kernels {

namespace {

void check_sizes(std::span<const double> table, std::span<const double> x, std::span<double> y) {
    if (y.size() != x.size() || table.size() + 1 != 2 * x.size()) {
        throw std::invalid_argument("toeplitz_apply: size mismatch");
    }
}

inline double row(const double* table, const double* x, std::size_t n, std::size_t i) {
    // table[i - j + n - 1] for j = 0..n-1 runs backwards from table[i + n - 1].
    const double* t = table + i + n - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += t[-static_cast<std::ptrdiff_t>(j)] * x[j];
    return acc;
}

}  // namespace

void toeplitz_apply_serial(std::span<const double> table, std::span<const double> x, std::span<double> y) {
    check_sizes(table, x, y);
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = row(table.data(), x.data(), n, i);
}

void toeplitz_apply_parallel(std::span<const double> table, std::span<const double> x, std::span<double> y) {
    check_sizes(table, x, y);
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const double* t = table.data();
    const double* xs = x.data();
    double* ys = y.data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ys[i] = row(t, xs, static_cast<std::size_t>(n), static_cast<std::size_t>(i));
    }
}

int available_threads() {
    if (omp_in_parallel()) return 1;
    return omp_get_max_threads();
}

}  // namespace gbevolve::kernels
