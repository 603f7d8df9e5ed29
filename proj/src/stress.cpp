#include "gbevolve/stress.hpp"

#include "gbevolve/kernels.hpp"
#include "gbevolve/monitors.hpp"
#include "gbevolve/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace gbevolve {

namespace {

// Image pair contribution for offset s, summed from the far end so the small
// terms accumulate first.
double image_sum(double s, double length, int terms, double eps) {
    double acc = 0.0;
    for (int k = terms; k >= 1; --k) {
        const double shift = k * length;
        const double plus = s + shift;
        const double minus = s - shift;
        if (eps > 0.0 && (std::abs(plus) <= eps || std::abs(minus) <= eps)) {
            if (std::abs(plus) > eps) acc += 1.0 / plus;
            if (std::abs(minus) > eps) acc += 1.0 / minus;
        } else {
            acc += 2.0 * s / (s * s - shift * shift);
        }
    }
    return acc;
}

}  // namespace

StressOperator::StressOperator(const Grid& grid, double kbeta, Options options)
    : grid_(grid), kbeta_(kbeta), options_(options) {
    if (options_.image_terms < 0) throw InvalidArgument("image_terms must be nonnegative");
    if (options_.eps < 0.0) throw InvalidArgument("eps must be nonnegative");
    const auto n = static_cast<std::ptrdiff_t>(grid.n);
    const double dx = grid.dx();
    const double length = grid.length();
    table_.assign(static_cast<std::size_t>(2 * n - 1), 0.0);
    for (std::ptrdiff_t l = -(n - 1); l <= n - 1; ++l) {
        const double s = static_cast<double>(l) * dx;
        double w = 0.0;
        if (options_.local && l != 0) {
            const auto wrapped = std::min(std::abs(l), n - std::abs(l));
            const bool excluded = options_.eps > 0.0 && static_cast<double>(wrapped) * dx <= options_.eps;
            if (!excluded) w += 1.0 / s;
        }
        if (options_.image_terms > 0) w += image_sum(s, length, options_.image_terms, options_.eps);
        table_[static_cast<std::size_t>(l + n - 1)] = w;
    }
}

Field StressOperator::apply(const Field& hx) const {
    if (!(hx.grid() == grid_)) throw InvalidArgument("stress operator: grid mismatch");
    const std::size_t n = grid_.n;
    std::vector<double> out(n);
    if (options_.parallel) {
        kernels::toeplitz_apply_parallel(table_, hx.values(), out);
    } else {
        kernels::toeplitz_apply_serial(table_, hx.values(), out);
    }
    const double dx = grid_.dx();
    for (std::size_t i = 0; i < n; ++i) {
        double v = dx * out[i];
        if (options_.local) v -= 0.5 * (hx[(i + 1) % n] - hx[(i + n - 1) % n]);
        out[i] = kbeta_ * v;
    }
    return Field(grid_, std::move(out));
}

Field sigma_i2_direct(const Field& hx, double kbeta) {
    return StressOperator(hx.grid(), kbeta, {.local = true, .image_terms = 0, .eps = 0.0}).apply(hx);
}

Field sigma_i2_truncated(const Field& hx, double kbeta, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("truncation eps must be positive");
    return StressOperator(hx.grid(), kbeta, {.local = true, .image_terms = 0, .eps = eps}).apply(hx);
}

Field sigma_i1_images(const Field& hx, double kbeta, int image_terms, double eps) {
    if (image_terms < 1) throw InvalidArgument("image_terms must be at least 1");
    return StressOperator(hx.grid(), kbeta, {.local = false, .image_terms = image_terms, .eps = eps}).apply(hx);
}

Field sigma_spectral_oracle(const Field& hx, double kbeta) {
    const std::size_t n = hx.size();
    auto coeffs = spectral::forward(hx.values());
    const std::complex<double> multiplier(0.0, -std::numbers::pi * kbeta);
    coeffs.front() = 0.0;
    coeffs.back() = 0.0;  // Nyquist, n even
    for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) coeffs[k] *= multiplier;
    return Field(hx.grid(), spectral::inverse(coeffs, n));
}

double resolve_truncation_eps(const ModelParams& params, const SigmaMethod& method) {
    const double eps = method.eps > 0.0 ? method.eps : params.kappa;
    if (!(eps > 0.0)) throw InvalidArgument("kappa_truncated stress needs eps > 0 (kappa is 0)");
    return eps;
}

StressOperator make_stress_operator(const Grid& grid, const ModelParams& params, const SigmaMethod& method) {
    switch (method.kind) {
        case SigmaKind::direct_pv:
            return StressOperator(grid, params.kbeta, {.local = true, .image_terms = params.image_terms});
        case SigmaKind::kappa_truncated:
            return StressOperator(grid, params.kbeta,
                                  {.local = true,
                                   .image_terms = params.image_terms,
                                   .eps = resolve_truncation_eps(params, method)});
        case SigmaKind::spectral_oracle:
            break;
    }
    throw InvalidArgument("spectral_oracle has no Toeplitz operator");
}

Field sigma_total(const Field& hx, const ModelParams& params, const SigmaMethod& method) {
    if (method.kind == SigmaKind::spectral_oracle) return sigma_spectral_oracle(hx, params.kbeta);
    return make_stress_operator(hx.grid(), params, method).apply(hx);
}

double image_tail_bound(const Field& hx, double kbeta, int image_terms) {
    if (image_terms < 1) throw InvalidArgument("image_terms must be at least 1");
    const double k = image_terms;
    return std::abs(kbeta) * lp_norm(hx, 1.0) * (1.0 / k + 1.0 / (k + 1.0)) / hx.grid().length();
}

std::vector<LpProbeRow> lp_boundedness_probe(const Field& f, double p, std::span<const double> eps_list) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("lp probe: need 1 < p < infinity");
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw InvalidArgument("lp probe: eps must be positive");
    }
    const double denom = lp_norm(f, p);
    std::vector<LpProbeRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        if (denom == 0.0) {
            rows.push_back({eps, 0.0, true});
            continue;
        }
        rows.push_back({eps, lp_norm(sigma_i2_truncated(f, 1.0, eps), p) / denom, false});
    }
    return rows;
}

}  // namespace gbevolve
