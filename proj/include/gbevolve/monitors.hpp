#pragma once

#include "gbevolve/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gbevolve {

/// (sum_j |f_j|^p dx)^(1/p), p >= 1.
double lp_norm(const Field& f, double p);

/// max_j |f_j|.
double linf_norm(const Field& f);

/// Periodic H^{-2} norm with multiplier (1 + |xi|^2)^{-1}, xi = 2 pi k / L,
/// normalized so that it never exceeds the discrete L^2 norm.
double hminus2_norm(const Field& f);

inline constexpr const char* hminus2_multiplier = "(1+|xi|^2)^-1, xi = 2 pi k / L";

/// Norms and functionals of the a priori estimate ladder, for one trajectory.
/// Time integrals use the trapezoid rule on the snapshot times; h_t is the
/// snapshot difference quotient, piecewise constant between snapshots.
struct EstimateReport {
    double sup_l2_h = 0.0;         ///< sup_t ||h||^2
    double int_l3_hx = 0.0;        ///< int ||h_x||_{L3}^3 dt
    double sup_l2_hx = 0.0;        ///< sup_t ||h_x||^2
    double weighted_h2 = 0.0;      ///< int int (|h_x|_kappa + B) |h_xx|^2
    double l43_ht = 0.0;           ///< ||h_t||_{L^{4/3}(Q)}
    double l43_flux_grad = 0.0;    ///< int ||(|h_x| h_x)_x||_{L^{4/3}}^{4/3} dt
    double l83_linf_hx = 0.0;      ///< int ||h_x||_inf^{8/3} dt
    double corner_metric = 0.0;    ///< sup_t max_j |h_xx|
    /// int int (F_kappa(h_x) + B h_x) h_x, the mixed energy term; informational only.
    double mixed_energy = 0.0;

    /// Name/value pairs of every field, in declaration order.
    std::vector<std::pair<std::string, double>> entries() const;
};

EstimateReport build_report(const Trajectory& traj);

/// Smooth space-time test function phi(t, x) with its partial derivatives.
struct TestFunction {
    std::string name;
    std::function<double(double, double)> value;
    std::function<double(double, double)> dt;
    std::function<double(double, double)> dx;
};

/// phi = trig(2 pi mode (x - a) / L) (t_end - t)^power, trig = cos or sin.
TestFunction fourier_cutoff(const Grid& grid, int mode, bool sine, int power, double t_end);

/// The built-in family: modes 1, 2; cos and sin; powers 1, 2.
std::vector<TestFunction> default_test_functions(const Grid& grid, double t_end);

/// |(h, phi_t) - alpha1 (F_kappa(h_x) + B h_x, phi_x) - ((alpha2 sigma + alpha3)(|h_x|_kappa + B), phi)
///   + (h0, phi(0))| by space-time trapezoid quadrature over the snapshots.
/// kappa = 0 is the weak form of the original problem; degenerate drops every B term.
/// sigma is evaluated with the trajectory's own method unless one is given.
double weak_residual(const Trajectory& traj, const TestFunction& phi, const ModelParams& params, bool degenerate,
                     std::optional<SigmaMethod> sigma = std::nullopt);

/// Largest weak_residual over default_test_functions.
double weak_residual_family(const Trajectory& traj, const ModelParams& params, bool degenerate,
                            std::optional<SigmaMethod> sigma = std::nullopt);

/// sum_m || w(t_{m+1}) - w(t_m) ||_{H^-2}, w = |h_x| h_x: the time integral of
/// ||w_t||_{H^-2} for piecewise-linear-in-time w.
double flux_time_derivative_norm(const Trajectory& traj);

/// Trapezoid integral of ||rhs(h(t))||_{L^{4/3}}^{4/3} over the snapshots,
/// raised to 3/4: the bound l43_ht should respect.
double rhs_l43_bound(const Trajectory& traj);

}  // namespace gbevolve
