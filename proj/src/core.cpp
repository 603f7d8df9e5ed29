#include "gbevolve/core.hpp"

#include "gbevolve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbevolve {

namespace {

std::string describe(const char* field, const char* rule) {
    std::ostringstream os;
    os << field << " must be " << rule;
    return os.str();
}

}  // namespace

void ModelParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(alpha1) || alpha1 <= 0.0) throw InvalidArgument(describe("alpha1", "positive"));
    if (!finite(alpha2) || alpha2 < 0.0) throw InvalidArgument(describe("alpha2", "nonnegative"));
    if (!finite(alpha3)) throw InvalidArgument(describe("alpha3", "finite"));
    if (!finite(cap_b) || cap_b < 0.0 || cap_b > 1.0) throw InvalidArgument(describe("B", "in [0, 1]"));
    if (!finite(kappa) || kappa < 0.0 || kappa > 1.0) throw InvalidArgument(describe("kappa", "in [0, 1]"));
    if (!finite(kbeta) || kbeta <= 0.0) throw InvalidArgument(describe("kbeta", "positive"));
    if (image_terms < 1) throw InvalidArgument(describe("image_terms", "at least 1"));
    if (!finite(dominance_factor) || dominance_factor <= 0.0)
        throw InvalidArgument(describe("dominance_factor", "positive"));
}

Grid make_grid(double a, double d, std::size_t n) {
    if (!std::isfinite(a) || !std::isfinite(d) || !(d > a)) throw InvalidArgument("grid: need d > a (empty domain)");
    if (n < 8) throw InvalidArgument("grid: need n >= 8");
    if (n % 2 != 0) throw InvalidArgument("grid: n must be even");
    return Grid{a, d, n};
}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n) throw InvalidArgument("field: value count does not match grid.n");
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j])) {
            throw NonFiniteError("field: non-finite value at index " + std::to_string(j));
        }
    }
}

Field Field::constant(const Grid& grid, double value) { return Field(grid, std::vector<double>(grid.n, value)); }

void require_same_grid(const Field& f, const Field& g) {
    if (!(f.grid() == g.grid())) throw InvalidArgument("fields live on different grids");
}

Field operator+(const Field& f, const Field& g) {
    require_same_grid(f, g);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f[j] + g[j];
    return Field(f.grid(), std::move(v));
}

Field operator-(const Field& f, const Field& g) {
    require_same_grid(f, g);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f[j] - g[j];
    return Field(f.grid(), std::move(v));
}

Field operator*(double s, const Field& f) {
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = s * f[j];
    return Field(f.grid(), std::move(v));
}

Field derivative_x(const Field& f) {
    const std::size_t n = f.size();
    const double inv = 1.0 / (2.0 * f.grid().dx());
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) * inv;
    }
    return Field(f.grid(), std::move(v));
}

Field second_derivative_x(const Field& f) {
    const std::size_t n = f.size();
    const double dx = f.grid().dx();
    const double inv = 1.0 / (dx * dx);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = (f[(j + 1) % n] - 2.0 * f[j] + f[(j + n - 1) % n]) * inv;
    }
    return Field(f.grid(), std::move(v));
}

Field forward_difference(const Field& f) {
    const std::size_t n = f.size();
    const double inv = 1.0 / f.grid().dx();
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = (f[(j + 1) % n] - f[j]) * inv;
    return Field(f.grid(), std::move(v));
}

double integrate(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().dx();
}

ValidationReport validate_initial_data(const Field& h0, const ModelParams& params) {
    ValidationReport r;
    const std::size_t n = h0.size();
    const double dx = h0.grid().dx();

    // Slopes of the faces touching the seam: (n-2, n-1), (n-1, 0), (0, 1).
    auto slope = [&](std::size_t j) { return std::abs(h0[(j + 1) % n] - h0[j]) / dx; };
    r.seam_slope = std::max({slope(n - 2), slope(n - 1), slope(0)});
    for (std::size_t j = 1; j + 2 < n; ++j) r.interior_slope = std::max(r.interior_slope, slope(j));

    double scale = 0.0;
    for (double v : h0.values()) scale = std::max(scale, std::abs(v));
    const double abs_tol = 1e-12 * std::max(1.0, scale) / dx;
    if (r.seam_slope > seam_slope_factor * r.interior_slope + abs_tol) {
        r.seam_ok = false;
        r.failures.push_back("seam: one-sided derivatives at x=a and x=d disagree (seam slope " +
                             std::to_string(r.seam_slope) + " vs interior " + std::to_string(r.interior_slope) +
                             ")");
    }

    double l2 = 0.0;
    double semi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        l2 += h0[j] * h0[j] * dx;
        const double s = (h0[(j + 1) % n] - h0[j]) / dx;
        semi += s * s * dx;
    }
    r.h1_norm = std::sqrt(l2 + semi);
    r.h1_finite = std::isfinite(r.h1_norm);
    if (!r.h1_finite) r.failures.push_back("h1: discrete H^1 norm is not finite");

    r.dominance_ok = params.in_dominance_regime();
    if (!r.dominance_ok) {
        r.warnings.push_back("alpha1 < dominance_factor * alpha2: outside the regime where the energy estimates close");
    }
    return r;
}

Field fourier_smooth(const Field& f, std::size_t cutoff) {
    auto coeffs = spectral::forward(f.values());
    for (std::size_t k = cutoff + 1; k < coeffs.size(); ++k) coeffs[k] = 0.0;
    return Field(f.grid(), spectral::inverse(coeffs, f.size()));
}

std::string to_string(SigmaKind kind) {
    switch (kind) {
        case SigmaKind::direct_pv: return "direct_pv";
        case SigmaKind::kappa_truncated: return "kappa_truncated";
        case SigmaKind::spectral_oracle: return "spectral_oracle";
    }
    return "unknown";
}

std::optional<SigmaKind> sigma_kind_from_string(const std::string& name) {
    if (name == "direct_pv") return SigmaKind::direct_pv;
    if (name == "kappa_truncated") return SigmaKind::kappa_truncated;
    if (name == "spectral_oracle") return SigmaKind::spectral_oracle;
    return std::nullopt;
}

}  // namespace gbevolve
