#include "gbevolve/monitors.hpp"

#include "gbevolve/evolution.hpp"
#include "gbevolve/regularization.hpp"
#include "gbevolve/spectral.hpp"
#include "gbevolve/stress.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gbevolve {

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("lp_norm: need finite p >= 1");
    double s = 0.0;
    if (p == 1.0) {
        for (double v : f.values()) s += std::abs(v);
        return s * f.grid().dx();
    }
    if (p == 2.0) {
        for (double v : f.values()) s += v * v;
        return std::sqrt(s * f.grid().dx());
    }
    for (double v : f.values()) s += std::pow(std::abs(v), p);
    return std::pow(s * f.grid().dx(), 1.0 / p);
}

double linf_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double hminus2_norm(const Field& f) {
    const std::size_t n = f.size();
    const double length = f.grid().length();
    const auto coeffs = spectral::forward(f.values());
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double xi = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
        const double weight = 1.0 / (1.0 + xi * xi);
        const double multiplicity = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
        s += multiplicity * std::norm(coeffs[k]) * weight * weight;
    }
    return std::sqrt(s * length) / static_cast<double>(n);
}

std::vector<std::pair<std::string, double>> EstimateReport::entries() const {
    return {{"sup_l2_h", sup_l2_h},
            {"int_l3_hx", int_l3_hx},
            {"sup_l2_hx", sup_l2_hx},
            {"weighted_h2", weighted_h2},
            {"l43_ht", l43_ht},
            {"l43_flux_grad", l43_flux_grad},
            {"l83_linf_hx", l83_linf_hx},
            {"corner_metric", corner_metric},
            {"mixed_energy", mixed_energy}};
}

namespace {

// Per-snapshot integrands of the report.
struct SnapshotTerms {
    double l2_h;
    double l3_hx;
    double l2_hx;
    double weighted_h2;
    double flux_grad;
    double linf_hx;
    double corner;
    double mixed;
};

SnapshotTerms snapshot_terms(const Field& h, const ModelParams& params) {
    const Field hx = derivative_x(h);
    const Field hxx = second_derivative_x(h);
    const double dx = h.grid().dx();
    std::vector<double> w(hx.size());
    double weighted = 0.0;
    double mixed = 0.0;
    for (std::size_t j = 0; j < hx.size(); ++j) {
        const double p = hx[j];
        w[j] = std::abs(p) * p;
        weighted += (abs_kappa(p, params.kappa) + params.cap_b) * hxx[j] * hxx[j];
        mixed += (flux_kappa(p, params.kappa) + params.cap_b * p) * p;
    }
    const Field wx = derivative_x(Field(h.grid(), std::move(w)));
    const double l2h = lp_norm(h, 2.0);
    const double l2hx = lp_norm(hx, 2.0);
    const double l3 = lp_norm(hx, 3.0);
    const double l43 = lp_norm(wx, 4.0 / 3.0);
    return {l2h * l2h,
            l3 * l3 * l3,
            l2hx * l2hx,
            weighted * dx,
            std::pow(l43, 4.0 / 3.0),
            std::pow(linf_norm(hx), 8.0 / 3.0),
            linf_norm(hxx),
            mixed * dx};
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t m = 0; m + 1 < t.size(); ++m) s += 0.5 * (t[m + 1] - t[m]) * (q[m] + q[m + 1]);
    return s;
}

}  // namespace

EstimateReport build_report(const Trajectory& traj) {
    EstimateReport r;
    if (traj.snapshots.empty()) return r;
    const std::size_t count = traj.snapshots.size();
    std::vector<double> times(count);
    std::vector<SnapshotTerms> terms;
    terms.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
        times[m] = traj.snapshots[m].t;
        terms.push_back(snapshot_terms(traj.snapshots[m].h, traj.params));
    }
    auto column = [&](double SnapshotTerms::*member) {
        std::vector<double> v(count);
        for (std::size_t m = 0; m < count; ++m) v[m] = terms[m].*member;
        return v;
    };
    auto sup = [&](double SnapshotTerms::*member) {
        double s = 0.0;
        for (const auto& t : terms) s = std::max(s, t.*member);
        return s;
    };

    r.sup_l2_h = sup(&SnapshotTerms::l2_h);
    r.sup_l2_hx = sup(&SnapshotTerms::l2_hx);
    r.corner_metric = sup(&SnapshotTerms::corner);
    r.int_l3_hx = trapezoid(times, column(&SnapshotTerms::l3_hx));
    r.weighted_h2 = trapezoid(times, column(&SnapshotTerms::weighted_h2));
    r.l43_flux_grad = trapezoid(times, column(&SnapshotTerms::flux_grad));
    r.l83_linf_hx = trapezoid(times, column(&SnapshotTerms::linf_hx));
    r.mixed_energy = trapezoid(times, column(&SnapshotTerms::mixed));

    double ht = 0.0;
    const double dx = traj.grid.dx();
    for (std::size_t m = 0; m + 1 < count; ++m) {
        const double span = times[m + 1] - times[m];
        const Field& a = traj.snapshots[m].h;
        const Field& b = traj.snapshots[m + 1].h;
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) s += std::pow(std::abs(b[j] - a[j]) / span, 4.0 / 3.0);
        ht += span * s * dx;
    }
    r.l43_ht = std::pow(ht, 0.75);
    return r;
}

TestFunction fourier_cutoff(const Grid& grid, int mode, bool sine, int power, double t_end) {
    const double omega = 2.0 * std::numbers::pi * mode / grid.length();
    const double a = grid.a;
    auto trig = [=](double x) { return sine ? std::sin(omega * (x - a)) : std::cos(omega * (x - a)); };
    auto dtrig = [=](double x) { return sine ? omega * std::cos(omega * (x - a)) : -omega * std::sin(omega * (x - a)); };
    auto cut = [=](double t) { return std::pow(t_end - t, power); };
    auto dcut = [=](double t) { return -power * std::pow(t_end - t, power - 1); };
    std::string name = std::string(sine ? "sin" : "cos") + std::to_string(mode) + "_p" + std::to_string(power);
    return {std::move(name), [=](double t, double x) { return trig(x) * cut(t); },
            [=](double t, double x) { return trig(x) * dcut(t); }, [=](double t, double x) { return dtrig(x) * cut(t); }};
}

std::vector<TestFunction> default_test_functions(const Grid& grid, double t_end) {
    std::vector<TestFunction> family;
    for (int mode : {1, 2}) {
        for (bool sine : {false, true}) {
            for (int power : {1, 2}) family.push_back(fourier_cutoff(grid, mode, sine, power, t_end));
        }
    }
    return family;
}

double weak_residual(const Trajectory& traj, const TestFunction& phi, const ModelParams& params, bool degenerate,
                     std::optional<SigmaMethod> sigma) {
    if (traj.snapshots.empty()) throw InvalidArgument("weak_residual: empty trajectory");
    const Grid& grid = traj.grid;
    const std::size_t n = grid.n;
    const double dx = grid.dx();
    const double t_end = traj.final_time();
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(phi.value(t_end, grid.x(j))) > 1e-12) {
            throw InvalidArgument("weak_residual: test function must vanish at the final time");
        }
    }

    ModelParams eff = params;
    if (degenerate) eff.cap_b = 0.0;
    const SigmaMethod method = sigma.value_or(traj.sigma_method);
    std::optional<Evolver> stress_eval;
    if (eff.alpha2 != 0.0) stress_eval.emplace(grid, eff, method);

    const std::size_t count = traj.snapshots.size();
    std::vector<double> times(count);
    std::vector<double> integrand(count);
    for (std::size_t m = 0; m < count; ++m) {
        const double t = traj.snapshots[m].t;
        const Field& h = traj.snapshots[m].h;
        times[m] = t;
        const Field hx = derivative_x(h);
        std::vector<double> sig(n, 0.0);
        if (stress_eval) {
            const Field s = stress_eval->stress(h);
            sig.assign(s.values().begin(), s.values().end());
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = grid.x(j);
            const double p = hx[j];
            const double flux = eff.alpha1 * (flux_kappa(p, eff.kappa) + eff.cap_b * p);
            const double zeroth = (eff.alpha2 * sig[j] + eff.alpha3) * (abs_kappa(p, eff.kappa) + eff.cap_b);
            acc += h[j] * phi.dt(t, x) - flux * phi.dx(t, x) - zeroth * phi.value(t, x);
        }
        integrand[m] = acc * dx;
    }
    double initial = 0.0;
    const Field& h0 = traj.snapshots.front().h;
    for (std::size_t j = 0; j < n; ++j) initial += h0[j] * phi.value(traj.snapshots.front().t, grid.x(j));
    return std::abs(trapezoid(times, integrand) + initial * dx);
}

double weak_residual_family(const Trajectory& traj, const ModelParams& params, bool degenerate,
                            std::optional<SigmaMethod> sigma) {
    double worst = 0.0;
    for (const auto& phi : default_test_functions(traj.grid, traj.final_time())) {
        worst = std::max(worst, weak_residual(traj, phi, params, degenerate, sigma));
    }
    return worst;
}

double flux_time_derivative_norm(const Trajectory& traj) {
    if (traj.snapshots.size() < 2) return 0.0;
    auto flux_of = [](const Field& h) {
        const Field hx = derivative_x(h);
        std::vector<double> w(hx.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::abs(hx[j]) * hx[j];
        return Field(h.grid(), std::move(w));
    };
    double total = 0.0;
    Field prev = flux_of(traj.snapshots.front().h);
    for (std::size_t m = 1; m < traj.snapshots.size(); ++m) {
        Field cur = flux_of(traj.snapshots[m].h);
        total += hminus2_norm(cur - prev);
        prev = std::move(cur);
    }
    return total;
}

double rhs_l43_bound(const Trajectory& traj) {
    if (traj.snapshots.size() < 2) return 0.0;
    const Evolver evolver(traj.grid, traj.params, traj.sigma_method);
    std::vector<double> times;
    std::vector<double> q;
    for (const auto& snap : traj.snapshots) {
        times.push_back(snap.t);
        q.push_back(std::pow(lp_norm(evolver.rhs(snap.h), 4.0 / 3.0), 4.0 / 3.0));
    }
    return std::pow(trapezoid(times, q), 0.75);
}

}  // namespace gbevolve
