#include "gbevolve/regularization.hpp"

#include "gbevolve/core.hpp"

#include <cmath>

namespace gbevolve {

namespace {

void require_kappa(double kappa) {
    if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be nonnegative");
}

// asinh(z) / z, accurate near z = 0.
double asinh_over(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + 3.0 * z2 * z2 / 40.0;
    }
    return std::asinh(z) / z;
}

}  // namespace

double abs_kappa(double p, double kappa) {
    require_kappa(kappa);
    if (kappa == 0.0) return std::abs(p);
    return std::hypot(p, kappa);
}

double flux_kappa(double p, double kappa) {
    require_kappa(kappa);
    const double q = std::abs(p);
    if (kappa == 0.0) return 0.5 * p * q;
    // Evaluated for |p| and signed afterwards so asinh never sees cancellation.
    const double value = 0.5 * (q * std::hypot(q, kappa) + kappa * kappa * std::asinh(q / kappa));
    return std::copysign(value, p);
}

double flux_secant(double p, double kappa) {
    require_kappa(kappa);
    const double q = std::abs(p);
    if (kappa == 0.0) return 0.5 * q;
    // F/p = (sqrt(p^2 + k^2) + k * asinh(p/k) / (p/k)) / 2
    return 0.5 * (std::hypot(q, kappa) + kappa * asinh_over(q / kappa));
}

double flux_kappa_error_bound(double p, double kappa) {
    require_kappa(kappa);
    return kappa * std::abs(p);
}

}  // namespace gbevolve
