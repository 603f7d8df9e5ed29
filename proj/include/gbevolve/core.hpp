#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbevolve {

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computed state contains NaN or infinity.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Dimensionless coefficients of the grain-boundary equation
 *
 *   h_t = alpha1 (F_kappa(h_x) + B h_x)_x - (alpha2 sigma + alpha3)(|h_x|_kappa + B)
 *
 * plus the truncation controls of the stress evaluation.
 */
struct ModelParams {
    double alpha1 = 1.0;        ///< degenerate diffusion coefficient (gamma H)
    double alpha2 = 0.0;        ///< coupling to the disconnection stress (b)
    double alpha3 = 0.0;        ///< constant driving force (tau b + Psi H)
    double cap_b = 0.5;         ///< equilibrium disconnection density B
    double kappa = 0.0;         ///< regularization parameter, in [0, 1]
    double kbeta = 1.0;         ///< kernel strength K beta
    int image_terms = 64;       ///< periodic images kept on each side
    double dominance_factor = 10.0;  ///< alpha1 >= factor * alpha2 counts as well posed

    /// Throws InvalidArgument naming the first offending field.
    void validate() const;

    /// True when alpha1 dominates alpha2 by dominance_factor.
    bool in_dominance_regime() const { return alpha1 >= dominance_factor * alpha2; }
};

/// Uniform periodic grid on (a, d); sample j sits at a + j dx, index n wraps to 0.
struct Grid {
    double a = 0.0;
    double d = 1.0;
    std::size_t n = 8;

    double length() const { return d - a; }
    double dx() const { return (d - a) / static_cast<double>(n); }
    double x(std::size_t j) const { return a + static_cast<double>(j) * dx(); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Validated grid constructor: d > a, n even and n >= 8.
Grid make_grid(double a, double d, std::size_t n);

/// Point samples of a periodic function. Immutable once built.
class Field {
public:
    Field(const Grid& grid, std::vector<double> values);

    static Field constant(const Grid& grid, double value);

    template <class F>
    static Field sample(const Grid& grid, F&& f) {
        std::vector<double> v(grid.n);
        for (std::size_t j = 0; j < grid.n; ++j) v[j] = f(grid.x(j));
        return Field(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }

    /// Periodic access, any integer index.
    double wrap(std::ptrdiff_t j) const {
        const auto n = static_cast<std::ptrdiff_t>(values_.size());
        return values_[static_cast<std::size_t>(((j % n) + n) % n)];
    }

    std::vector<double> to_vector() const { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Same grid (exact comparison); throws otherwise.
void require_same_grid(const Field& f, const Field& g);

Field operator+(const Field& f, const Field& g);
Field operator-(const Field& f, const Field& g);
Field operator*(double s, const Field& f);

/// Centered periodic difference (f_{j+1} - f_{j-1}) / (2 dx).
Field derivative_x(const Field& f);

/// Periodic second difference (f_{j+1} - 2 f_j + f_{j-1}) / dx^2.
Field second_derivative_x(const Field& f);

/// Forward difference (f_{j+1} - f_j) / dx, living on face j + 1/2.
Field forward_difference(const Field& f);

/// Discrete integral sum_j f_j dx.
double integrate(const Field& f);

struct ValidationReport {
    bool periodic = true;         ///< automatic on a periodic grid
    bool seam_ok = true;          ///< one-sided slopes at the seam are consistent
    bool h1_finite = true;        ///< discrete H^1 norm finite
    bool dominance_ok = true;     ///< alpha1 >= dominance_factor * alpha2 (warning only)
    double h1_norm = 0.0;
    double seam_slope = 0.0;      ///< max one-sided difference quotient touching the seam
    double interior_slope = 0.0;  ///< max difference quotient away from the seam
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    bool passed() const { return failures.empty(); }
};

/// Seam slopes may exceed the interior maximum by this factor before the
/// datum is flagged as discontinuous across x = a ~ x = d.
inline constexpr double seam_slope_factor = 4.0;

ValidationReport validate_initial_data(const Field& h0, const ModelParams& params);

/// Projection onto Fourier modes |k| <= cutoff (optional mollifier for h0).
Field fourier_smooth(const Field& f, std::size_t cutoff);

struct Snapshot {
    double t;
    Field h;
};

enum class SigmaKind { direct_pv, kappa_truncated, spectral_oracle };

/// How sigma_i is evaluated. For kappa_truncated, eps == 0 means "use params.kappa".
struct SigmaMethod {
    SigmaKind kind = SigmaKind::direct_pv;
    double eps = 0.0;

    static SigmaMethod direct() { return {SigmaKind::direct_pv, 0.0}; }
    static SigmaMethod truncated(double eps = 0.0) { return {SigmaKind::kappa_truncated, eps}; }
    static SigmaMethod spectral() { return {SigmaKind::spectral_oracle, 0.0}; }

    friend bool operator==(const SigmaMethod&, const SigmaMethod&) = default;
};

std::string to_string(SigmaKind kind);
std::optional<SigmaKind> sigma_kind_from_string(const std::string& name);

struct Trajectory {
    ModelParams params;
    Grid grid;
    SigmaMethod sigma_method;
    std::vector<Snapshot> snapshots;
    std::vector<double> dt_history;
    bool diverged = false;
    std::string diagnostic;

    double final_time() const { return snapshots.empty() ? 0.0 : snapshots.back().t; }
    const Field& final_state() const { return snapshots.back().h; }
};

}  // namespace gbevolve
