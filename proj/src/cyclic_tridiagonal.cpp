#include "gbevolve/cyclic_tridiagonal.hpp"

#include "gbevolve/core.hpp"

#include <cmath>

namespace gbevolve {

namespace {

// Plain Thomas algorithm on the non-periodic tridiagonal (a, b, c).
void thomas(std::span<const double> a, std::span<const double> b, std::span<const double> c,
            std::span<const double> r, std::span<double> x, std::vector<double>& scratch) {
    const std::size_t n = b.size();
    scratch.resize(n);
    double beta = b[0];
    if (beta == 0.0) throw NonFiniteError("tridiagonal solve: zero pivot");
    x[0] = r[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * scratch[i];
        if (beta == 0.0) throw NonFiniteError("tridiagonal solve: zero pivot");
        x[i] = (r[i] - a[i] * x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i + 1] * x[i + 1];
}

}  // namespace

std::vector<double> solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n < 3 || lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw InvalidArgument("cyclic tridiagonal: inconsistent sizes or n < 3");
    }
    const double alpha = upper[n - 1];  // row n-1, column 0
    const double beta = lower[0];       // row 0, column n-1
    const double gamma = -diag[0];

    std::vector<double> b(diag.begin(), diag.end());
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;

    std::vector<double> scratch;
    std::vector<double> x(n);
    thomas(lower, b, upper, rhs, x, scratch);

    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    std::vector<double> z(n);
    thomas(lower, b, upper, u, z, scratch);

    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
    for (double v : x) {
        if (!std::isfinite(v)) throw NonFiniteError("cyclic tridiagonal: non-finite solution");
    }
    return x;
}

}  // namespace gbevolve
