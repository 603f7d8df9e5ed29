#pragma once

namespace gbevolve {

/// |p|_kappa = sqrt(p^2 + kappa^2). kappa = 0 gives |p|.
double abs_kappa(double p, double kappa);

/// F_kappa(p) = int_0^p |y|_kappa dy, closed form; odd in p, F_kappa' = |p|_kappa.
double flux_kappa(double p, double kappa);

/// Secant slope F_kappa(p) / p, continuous at p = 0 with value kappa.
double flux_secant(double p, double kappa);

/// kappa |p|, an upper bound for |F_kappa(p) - F_0(p)|.
double flux_kappa_error_bound(double p, double kappa);

/// Scalar nonlinearities for one fixed kappa.
struct RegAbs {
    double kappa = 0.0;

    double operator()(double p) const { return abs_kappa(p, kappa); }
    double flux(double p) const { return flux_kappa(p, kappa); }
    double secant(double p) const { return flux_secant(p, kappa); }
};

}  // namespace gbevolve
