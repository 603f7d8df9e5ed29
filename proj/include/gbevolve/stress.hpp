#pragma once

#include "gbevolve/core.hpp"

#include <span>
#include <vector>

namespace gbevolve {

// The disconnection stress
//
//   sigma(x) = K beta P.V. int_R h_x(y) / (x - y) dy
//
// for periodic h_x splits into the in-cell part sigma_i2 (singular, principal
// value over (a, d)) and the image series sigma_i1 over the translated cells
// y + kL, k != 0. Both are collocated at the grid points with the trapezoid
// rule, so the whole evaluation is a Toeplitz product in the offset i - j.
//
// The principal value is taken by dropping the j == i node. Because the kernel
// is odd, that leaves only the even part of the integrand at the singular
// node, -h_x'(x_i), which the rule adds back as -(h_x[i+1] - h_x[i-1]) / 2.
// Without this term the rule is first order (mode m is scaled by 1 - 2m/n);
// with it, a single mode is scaled by 1 - 2m/n + sin(2 pi m/n)/pi.

/// Precomputed Toeplitz kernel for one grid and one stress variant.
class StressOperator {
public:
    struct Options {
        bool local = true;       ///< include the in-cell principal value part
        int image_terms = 0;     ///< periodic images per side, 0 = none
        double eps = 0.0;        ///< exclude pairs closer than eps (periodic distance), 0 = none
        bool parallel = true;    ///< OpenMP kernel vs serial reference
    };

    StressOperator(const Grid& grid, double kbeta, Options options);

    Field apply(const Field& hx) const;

    const Grid& grid() const { return grid_; }
    std::span<const double> table() const { return table_; }

private:
    Grid grid_;
    double kbeta_;
    Options options_;
    std::vector<double> table_;
};

/// In-cell principal value part, point exclusion plus the singular-node term.
Field sigma_i2_direct(const Field& hx, double kbeta);

/// sigma_i2 with every pair at periodic distance <= eps removed. Equal to
/// sigma_i2_direct for eps < dx.
Field sigma_i2_truncated(const Field& hx, double kbeta, double eps);

/// Image series truncated after image_terms pairs. With eps > 0 the one image
/// that lands within eps of x_i (a wrapped neighbour) is dropped as well.
Field sigma_i1_images(const Field& hx, double kbeta, int image_terms, double eps = 0.0);

/// Closed form of sigma_i1 + sigma_i2: Fourier multiplier -i pi kbeta sign(k),
/// mean and Nyquist modes zeroed.
Field sigma_spectral_oracle(const Field& hx, double kbeta);

/// Dispatch on method; kappa_truncated uses method.eps if set, else params.kappa.
Field sigma_total(const Field& hx, const ModelParams& params, const SigmaMethod& method);

/// Resolved truncation radius for kappa_truncated; throws if it is not positive.
double resolve_truncation_eps(const ModelParams& params, const SigmaMethod& method);

/// Builds the operator sigma_total would use, for repeated application.
StressOperator make_stress_operator(const Grid& grid, const ModelParams& params, const SigmaMethod& method);

/// Upper bound on ||sigma_i1(K) - sigma_i1(infinity)||_inf:
/// kbeta ||hx||_L1 sum_{k>K} 2L / ((kL)^2 - L^2) = kbeta ||hx||_L1 (1/K + 1/(K+1)) / L.
double image_tail_bound(const Field& hx, double kbeta, int image_terms);

struct LpProbeRow {
    double eps;
    double ratio;
    bool zero_input;
};

/// ||sigma_i2_truncated(f, 1, eps)||_p / ||f||_p for every eps.
std::vector<LpProbeRow> lp_boundedness_probe(const Field& f, double p, std::span<const double> eps_list);

}  // namespace gbevolve
