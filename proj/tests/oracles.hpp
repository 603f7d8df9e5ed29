#pragma once

// Reference values computed by adaptive quadrature, independent of the
// closed forms and discrete sums in the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double integrate(const std::function<double(double)>& f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

/// int_0^p sqrt(y^2 + kappa^2) dy
inline double flux_kappa(double p, double kappa) {
    const double s = integrate([&](double y) { return std::sqrt(y * y + kappa * kappa); }, 0.0, std::abs(p));
    return p < 0 ? -s : s;
}

/// Periodic Hilbert-type integral by the cotangent kernel:
/// P.V. int_0^L f(y) (pi/L) cot(pi (x - y) / L) dy, singularity subtracted.
inline double cot_pv(const std::function<double(double)>& f, double x, double length) {
    const double fx = f(x);
    auto g = [&](double y) {
        const double u = std::numbers::pi * (x - y) / length;
        return (f(y) - fx) * (std::numbers::pi / length) / std::tan(u);
    };
    return integrate(g, 0.0, x) + integrate(g, x, length);
}

/// In-cell kernel 1/(x - y) over y in (0, L), pairs at periodic distance
/// <= eps removed. Needs eps < L / 2.
inline double truncated_cell(const std::function<double(double)>& f, double x, double length, double eps) {
    // Cut points of the excluded set, then integrate over what remains.
    const double lo = 0.0;
    const double hi = length;
    const double cut_lo = x - eps;
    const double cut_hi = x + eps;
    std::vector<std::pair<double, double>> excluded{{cut_lo, cut_hi}};
    if (cut_lo < 0.0) excluded.push_back({cut_lo + length, length});
    if (cut_hi > length) excluded.push_back({0.0, cut_hi - length});
    std::vector<double> edges{lo, hi};
    for (auto [a, b] : excluded) {
        edges.push_back(std::clamp(a, lo, hi));
        edges.push_back(std::clamp(b, lo, hi));
    }
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        if (b - a <= 0.0) continue;
        const double mid = 0.5 * (a + b);
        bool inside = false;
        for (auto [ea, eb] : excluded) inside = inside || (mid > ea && mid < eb);
        if (inside) continue;
        total += integrate([&](double y) { return f(y) / (x - y); }, a, b);
    }
    return total;
}

}  // namespace oracle
