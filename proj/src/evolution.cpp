#include "gbevolve/evolution.hpp"

#include "gbevolve/cyclic_tridiagonal.hpp"
#include "gbevolve/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbevolve {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::explicit_euler ? "explicit_euler" : "semi_implicit";
}

std::optional<Scheme> scheme_from_string(const std::string& name) {
    if (name == "explicit_euler") return Scheme::explicit_euler;
    if (name == "semi_implicit") return Scheme::semi_implicit;
    return std::nullopt;
}

void StepperConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(dt_init)) throw InvalidArgument("dt_init must be positive");
    if (!positive(dt_min)) throw InvalidArgument("dt_min must be positive");
    if (!positive(dt_max)) throw InvalidArgument("dt_max must be positive");
    if (!(dt_min <= dt_init && dt_init <= dt_max)) throw InvalidArgument("need dt_min <= dt_init <= dt_max");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw InvalidArgument("cfl_safety must be in (0, 1]");
    if (!std::isfinite(t_end) || t_end < 0.0) throw InvalidArgument("t_end must be nonnegative");
    if (snapshot_stride < 1) throw InvalidArgument("snapshot_stride must be at least 1");
    if (!std::isfinite(snapshot_interval) || snapshot_interval < 0.0)
        throw InvalidArgument("snapshot_interval must be nonnegative");
    if (!positive(step_tolerance)) throw InvalidArgument("step_tolerance must be positive");
    if (growth_after < 1) throw InvalidArgument("growth_after must be at least 1");
}

Evolver::Evolver(const Grid& grid, const ModelParams& params, const SigmaMethod& method)
    : grid_(grid), params_(params), method_(method) {
    params_.validate();
    if (method_.kind == SigmaKind::kappa_truncated) resolve_truncation_eps(params_, method_);
    if (params_.alpha2 != 0.0 && method_.kind != SigmaKind::spectral_oracle) {
        stress_.emplace(make_stress_operator(grid_, params_, method_));
    }
}

Field Evolver::stress(const Field& h) const {
    const Field hx = derivative_x(h);
    if (stress_) return stress_->apply(hx);
    return sigma_total(hx, params_, method_);
}

Field Evolver::forcing(const Field& h) const {
    const std::size_t n = grid_.n;
    const double dx = grid_.dx();
    const double kappa = params_.kappa;
    const double b = params_.cap_b;
    std::vector<double> sigma(n, 0.0);
    if (params_.alpha2 != 0.0) {
        const Field s = stress(h);
        sigma.assign(s.values().begin(), s.values().end());
    }
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double slope = (h[(j + 1) % n] - h[(j + n - 1) % n]) / (2.0 * dx);
        g[j] = -(params_.alpha2 * sigma[j] + params_.alpha3) * (abs_kappa(slope, kappa) + b);
    }
    return Field(grid_, std::move(g));
}

Field Evolver::rhs(const Field& h) const {
    if (!(h.grid() == grid_)) throw InvalidArgument("rhs: field grid does not match the evolver grid");
    const std::size_t n = grid_.n;
    const double dx = grid_.dx();
    std::vector<double> face(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = (h[(j + 1) % n] - h[j]) / dx;
        face[j] = params_.alpha1 * (flux_kappa(p, params_.kappa) + params_.cap_b * p);
    }
    const Field g = forcing(h);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (face[j] - face[(j + n - 1) % n]) / dx + g[j];
    return Field(grid_, std::move(out));
}

double Evolver::stable_dt(const Field& h, double cfl_safety) const {
    const std::size_t n = grid_.n;
    const double dx = grid_.dx();
    double steepest = 0.0;
    for (std::size_t j = 0; j < n; ++j) steepest = std::max(steepest, std::abs(h[(j + 1) % n] - h[j]) / dx);
    const double coeff = abs_kappa(steepest, params_.kappa) + params_.cap_b;
    return cfl_safety * dx * dx / (2.0 * params_.alpha1 * coeff + floor_guard);
}

Field Evolver::step_explicit(const Field& h, double dt, StabilityPolicy policy) const {
    if (!(dt >= 0.0)) throw InvalidArgument("dt must be nonnegative");
    if (dt == 0.0) return h;
    const double limit = stable_dt(h, 1.0);
    if (dt > limit * (1.0 + 1e-12) && policy == StabilityPolicy::enforce) {
        std::ostringstream os;
        os << "explicit step dt=" << dt << " exceeds the stability limit " << limit;
        throw InvalidArgument(os.str());
    }
    const Field r = rhs(h);
    std::vector<double> out(grid_.n);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = h[j] + dt * r[j];
    return Field(grid_, std::move(out));
}

Field Evolver::step_semi_implicit(const Field& h, double dt) const {
    if (!(dt > 0.0)) throw InvalidArgument("semi-implicit step needs dt > 0");
    const std::size_t n = grid_.n;
    const double dx = grid_.dx();
    const double scale = dt * params_.alpha1 / (dx * dx);

    // face j sits between nodes j and j+1
    std::vector<double> coeff(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = (h[(j + 1) % n] - h[j]) / dx;
        coeff[j] = scale * (flux_secant(p, params_.kappa) + params_.cap_b);
    }
    std::vector<double> lower(n), diag(n), upper(n), rhs_vec(n);
    const Field g = forcing(h);
    for (std::size_t j = 0; j < n; ++j) {
        const double left = coeff[(j + n - 1) % n];
        const double right = coeff[j];
        lower[j] = -left;
        upper[j] = -right;
        diag[j] = 1.0 + left + right;
        rhs_vec[j] = h[j] + dt * g[j];
    }
    return Field(grid_, solve_cyclic_tridiagonal(lower, diag, upper, rhs_vec));
}

Field rhs(const Field& h, const ModelParams& params, const SigmaMethod& method) {
    return Evolver(h.grid(), params, method).rhs(h);
}

double stable_dt(const Field& h, const ModelParams& params, double cfl_safety) {
    return Evolver(h.grid(), params, SigmaMethod::spectral()).stable_dt(h, cfl_safety);
}

Field step_explicit(const Field& h, double dt, const ModelParams& params, const SigmaMethod& method,
                    StabilityPolicy policy) {
    return Evolver(h.grid(), params, method).step_explicit(h, dt, policy);
}

Field step_semi_implicit(const Field& h, double dt, const ModelParams& params, const SigmaMethod& method) {
    return Evolver(h.grid(), params, method).step_semi_implicit(h, dt);
}

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

double max_abs(const Field& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

Trajectory run(const Field& h0, const ModelParams& params, const StepperConfig& cfg, bool force) {
    params.validate();
    cfg.validate();
    if (!force) {
        const ValidationReport report = validate_initial_data(h0, params);
        if (!report.passed()) throw InvalidArgument("initial data rejected: " + report.failures.front());
    }

    const Evolver evolver(h0.grid(), params, cfg.sigma_method);
    Trajectory traj{params, h0.grid(), cfg.sigma_method, {}, {}, false, {}};
    traj.snapshots.push_back({0.0, h0});

    const double t_end = cfg.t_end;
    const bool by_interval = cfg.snapshot_interval > 0.0;
    // Shortened steps closer than this to a target are merged into it.
    const double merge_tol = 1e-12 * std::max(1.0, t_end);

    double t = 0.0;
    Field h = h0;
    double dt_ctrl = cfg.dt_init;
    int streak = 0;
    std::size_t accepted = 0;
    std::size_t next_snapshot = 1;
    bool last_recorded = true;

    auto target_time = [&]() {
        if (!by_interval) return t_end;
        return std::min(t_end, static_cast<double>(next_snapshot) * cfg.snapshot_interval);
    };

    auto diverge = [&](const std::string& why) {
        traj.diverged = true;
        std::ostringstream os;
        os << "diverged at t=" << t << ": " << why;
        traj.diagnostic = os.str();
    };

    while (t < t_end) {
        if (accepted >= cfg.max_steps) {
            diverge("step budget exhausted");
            break;
        }
        const double target = target_time();
        double dt = cfg.scheme == Scheme::explicit_euler ? std::min(evolver.stable_dt(h, cfg.cfl_safety), cfg.dt_max)
                                                         : dt_ctrl;
        bool lands = false;
        if (target - t - dt <= merge_tol) {
            dt = target - t;
            lands = true;
        }

        Field next = h;
        try {
            if (cfg.scheme == Scheme::explicit_euler) {
                next = evolver.step_explicit(h, dt, StabilityPolicy::warn);
            } else {
                const Field full = evolver.step_semi_implicit(h, dt);
                const Field half = evolver.step_semi_implicit(evolver.step_semi_implicit(h, 0.5 * dt), 0.5 * dt);
                const double err = max_abs_diff(full, half) / std::max(1.0, max_abs(half));
                if (err > cfg.step_tolerance && dt > cfg.dt_min) {
                    dt_ctrl = std::max(0.5 * dt, cfg.dt_min);
                    streak = 0;
                    continue;
                }
                next = half;
            }
        } catch (const NonFiniteError& e) {
            if (cfg.scheme == Scheme::semi_implicit && dt > cfg.dt_min) {
                dt_ctrl = std::max(0.5 * dt, cfg.dt_min);
                streak = 0;
                continue;
            }
            diverge(e.what());
            break;
        }

        h = std::move(next);
        t = lands ? target : t + dt;
        traj.dt_history.push_back(dt);
        ++accepted;
        last_recorded = false;

        if (cfg.scheme == Scheme::semi_implicit && !lands) {
            if (++streak >= cfg.growth_after) {
                dt_ctrl = std::min(2.0 * dt_ctrl, cfg.dt_max);
                streak = 0;
            }
        }

        const bool snap = by_interval ? lands : (accepted % static_cast<std::size_t>(cfg.snapshot_stride) == 0);
        if (snap || t >= t_end) {
            traj.snapshots.push_back({t, h});
            last_recorded = true;
            if (by_interval && lands) ++next_snapshot;
        }
    }
    if (!last_recorded) traj.snapshots.push_back({t, h});
    return traj;
}

}  // namespace gbevolve
