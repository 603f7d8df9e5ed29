#include "gbevolve/studies.hpp"

#include "gbevolve/regularization.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

namespace gbevolve {

int sweep_thread_cap() {
    if (const char* env = std::getenv("GB_EVOLVE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1, omp_get_num_procs());
}

namespace {

// State of `traj` at time t, linear in time between snapshots.
std::vector<double> state_at(const Trajectory& traj, double t) {
    const auto& snaps = traj.snapshots;
    auto it = std::lower_bound(snaps.begin(), snaps.end(), t, [](const Snapshot& s, double v) { return s.t < v; });
    if (it == snaps.end()) return snaps.back().h.to_vector();
    if (it->t == t || it == snaps.begin()) return it->h.to_vector();
    const Snapshot& hi = *it;
    const Snapshot& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    std::vector<double> v(lo.h.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = (1.0 - w) * lo.h[j] + w * hi.h[j];
    return v;
}

std::vector<Trajectory> run_members(const Field& h0, const std::vector<ModelParams>& params, const StepperConfig& cfg,
                                    std::vector<std::string>& errors) {
    const auto count = static_cast<std::ptrdiff_t>(params.size());
    std::vector<std::optional<Trajectory>> slots(params.size());
    errors.assign(params.size(), {});
#pragma omp parallel for num_threads(sweep_thread_cap()) schedule(dynamic, 1)
    for (std::ptrdiff_t m = 0; m < count; ++m) {
        const auto i = static_cast<std::size_t>(m);
        try {
            slots[i] = run(h0, params[i], cfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    std::vector<Trajectory> out;
    out.reserve(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            out.push_back(std::move(*slots[i]));
        } else {
            // Keep the lists aligned: a failed member is a one-snapshot diverged run.
            Trajectory t{params[i], h0.grid(), cfg.sigma_method, {{0.0, h0}}, {}, true, errors[i]};
            out.push_back(std::move(t));
        }
    }
    return out;
}

void require_strictly_decreasing_positive(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw InvalidArgument(std::string(what) + ": empty parameter list");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw InvalidArgument(std::string(what) + ": values must be positive");
        if (i > 0 && !(v[i] < v[i - 1])) throw InvalidArgument(std::string(what) + ": values must strictly decrease");
    }
}

void fill_common(SweepResult& r) {
    for (std::size_t m = 0; m < r.trajectories.size(); ++m) {
        const Trajectory& t = r.trajectories[m];
        r.reports.push_back(build_report(t));
        r.corner_metrics.push_back(r.reports.back().corner_metric);
        r.flux_time_norms.push_back(flux_time_derivative_norm(t));
        if (t.diverged) {
            std::ostringstream os;
            os << "member " << m << " (" << r.values[m] << "): " << t.diagnostic;
            r.diagnostics.push_back(os.str());
        }
    }
}

void fill_gaps(SweepResult& r, std::size_t levels) {
    for (std::size_t m = 0; m + 1 < levels; ++m) {
        const Trajectory& a = r.trajectories[m];
        const Trajectory& b = r.trajectories[m + 1];
        r.successive_l2q_gaps.push_back(l2q_gap_h(a, b));
        r.successive_hx_gaps.push_back(l2q_gap_hx(a, b));
        r.successive_abs_gaps.push_back(l2q_gap_abs_hx(a, b));
    }
}

}  // namespace

double l2q_gap(const Trajectory& a, const Trajectory& b,
               const std::function<Field(const Field&, const ModelParams&)>& observable) {
    if (!(a.grid == b.grid)) throw InvalidArgument("l2q_gap: trajectories live on different grids");
    if (a.snapshots.empty() || b.snapshots.empty()) throw InvalidArgument("l2q_gap: empty trajectory");
    const bool a_coarse = a.snapshots.size() <= b.snapshots.size();
    const Trajectory& coarse = a_coarse ? a : b;
    const Trajectory& fine = a_coarse ? b : a;
    const double end = std::min(a.final_time(), b.final_time());

    std::vector<double> times;
    std::vector<double> sq;
    const double dx = a.grid.dx();
    for (const auto& snap : coarse.snapshots) {
        if (snap.t > end) break;
        const Field f = observable(snap.h, coarse.params);
        const Field g = observable(Field(fine.grid, state_at(fine, snap.t)), fine.params);
        double s = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) s += (f[j] - g[j]) * (f[j] - g[j]);
        times.push_back(snap.t);
        sq.push_back(s * dx);
    }
    double total = 0.0;
    for (std::size_t m = 0; m + 1 < times.size(); ++m) total += 0.5 * (times[m + 1] - times[m]) * (sq[m] + sq[m + 1]);
    return std::sqrt(total);
}

double l2q_gap_h(const Trajectory& a, const Trajectory& b) {
    return l2q_gap(a, b, [](const Field& h, const ModelParams&) { return h; });
}

double l2q_gap_hx(const Trajectory& a, const Trajectory& b) {
    return l2q_gap(a, b, [](const Field& h, const ModelParams&) { return derivative_x(h); });
}

double l2q_gap_abs_hx(const Trajectory& a, const Trajectory& b) {
    return l2q_gap(a, b, [](const Field& h, const ModelParams& p) {
        const Field hx = derivative_x(h);
        std::vector<double> v(hx.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = abs_kappa(hx[j], p.kappa);
        return Field(h.grid(), std::move(v));
    });
}

SweepResult kappa_sweep(const Field& h0, const ModelParams& base, const StepperConfig& cfg,
                        const std::vector<double>& kappas) {
    require_strictly_decreasing_positive(kappas, "kappa_sweep");
    std::vector<ModelParams> members;
    for (double k : kappas) {
        ModelParams p = base;
        p.kappa = k;
        members.push_back(p);
    }
    SweepResult r;
    r.axis = SweepAxis::kappa;
    r.values = kappas;
    std::vector<std::string> errors;
    r.trajectories = run_members(h0, members, cfg, errors);
    fill_common(r);
    fill_gaps(r, r.trajectories.size());
    return r;
}

SweepResult b_sweep(const Field& h0, const ModelParams& base, const StepperConfig& cfg, const std::vector<double>& bs,
                    bool include_zero) {
    require_strictly_decreasing_positive(bs, "b_sweep");
    std::vector<ModelParams> members;
    for (double b : bs) {
        ModelParams p = base;
        p.cap_b = b;
        members.push_back(p);
    }
    SweepResult r;
    r.axis = SweepAxis::cap_b;
    r.values = bs;
    StepperConfig member_cfg = cfg;
    if (include_zero) {
        ModelParams p = base;
        p.cap_b = 0.0;
        p.kappa = 0.0;
        members.push_back(p);
        r.values.push_back(0.0);
        // kappa = 0 rules out a kappa-truncated stress for the whole sweep.
        if (member_cfg.sigma_method.kind == SigmaKind::kappa_truncated && member_cfg.sigma_method.eps == 0.0) {
            member_cfg.sigma_method = SigmaMethod::direct();
        }
    }
    std::vector<std::string> errors;
    r.trajectories = run_members(h0, members, member_cfg, errors);
    fill_common(r);
    fill_gaps(r, bs.size());
    if (include_zero) r.gap_to_zero = l2q_gap_h(r.trajectories[bs.size() - 1], r.trajectories.back());
    return r;
}

std::vector<TwinGap> twin_stability(const Field& h0a, const Field& h0b, const ModelParams& params,
                                    const StepperConfig& cfg) {
    require_same_grid(h0a, h0b);
    if (!(params.cap_b > 0.0)) throw InvalidArgument("twin_stability: needs B > 0");
    std::vector<Trajectory> runs(2);
    std::exception_ptr failure[2];
    const auto count = std::ptrdiff_t{2};
    const Field* starts[2] = {&h0a, &h0b};
#pragma omp parallel for num_threads(std::min(2, sweep_thread_cap())) schedule(static, 1)
    for (std::ptrdiff_t m = 0; m < count; ++m) {
        try {
            runs[static_cast<std::size_t>(m)] = run(*starts[m], params, cfg);
        } catch (...) {
            failure[m] = std::current_exception();
        }
    }
    for (const auto& f : failure) {
        if (f) std::rethrow_exception(f);
    }
    const Trajectory& a = runs[0];
    const Trajectory& b = runs[1];
    std::vector<TwinGap> gaps;
    const double end = std::min(a.final_time(), b.final_time());
    for (const auto& snap : a.snapshots) {
        if (snap.t > end) break;
        const auto other = state_at(b, snap.t);
        double s = 0.0;
        for (std::size_t j = 0; j < other.size(); ++j) s += (snap.h[j] - other[j]) * (snap.h[j] - other[j]);
        gaps.push_back({snap.t, std::sqrt(s * a.grid.dx())});
    }
    return gaps;
}

double fit_gronwall_rate(const std::vector<TwinGap>& gaps, double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("fit_gronwall_rate: delta must be positive");
    double c = 0.0;
    for (const auto& g : gaps) {
        if (g.t <= 0.0 || g.l2_gap <= 0.0) continue;
        c = std::max(c, std::log(g.l2_gap / delta) / g.t);
    }
    return c;
}

Field twin_perturbation(const Grid& grid, double delta) {
    const double omega = 4.0 * std::numbers::pi / grid.length();
    const Field shape = Field::sample(grid, [&](double x) { return std::cos(omega * (x - grid.a)); });
    double s = 0.0;
    for (double v : shape.values()) s += v * v;
    return (delta / std::sqrt(s * grid.dx())) * shape;
}

GronwallCheck gronwall_split_check(const std::vector<TwinGap>& gaps, double delta) {
    GronwallCheck out;
    if (gaps.empty()) return out;
    const double split = 0.5 * gaps.back().t;
    std::vector<TwinGap> first;
    for (const auto& g : gaps) {
        if (g.t <= split) first.push_back(g);
    }
    out.rate = fit_gronwall_rate(first, delta);
    for (const auto& g : gaps) {
        if (g.t <= split) continue;
        out.worst_ratio = std::max(out.worst_ratio, g.l2_gap / (delta * std::exp(out.rate * g.t)));
    }
    out.passed = std::isfinite(out.worst_ratio) && out.worst_ratio <= 1.0 + 1e-9;
    return out;
}

double spread_ratio(const std::vector<double>& v) {
    if (v.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi == 0.0) return 1.0;
    if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
    return *hi / *lo;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

namespace {

double worst_increase_ratio(const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] / v[i - 1]);
    return worst;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<CheckLine> check_kappa_sweep(const SweepResult& r, double spread_limit) {
    std::vector<CheckLine> out;
    out.push_back({"members finite", static_cast<double>(r.diagnostics.size()), 0.0, !r.any_diverged()});
    if (r.reports.empty()) return out;
    for (std::size_t f = 0; f < r.reports.front().entries().size(); ++f) {
        std::vector<double> column;
        for (const auto& rep : r.reports) column.push_back(rep.entries()[f].second);
        const double spread = spread_ratio(column);
        out.push_back({"spread " + r.reports.front().entries()[f].first, spread, spread_limit,
                       all_finite(column) && spread <= spread_limit});
    }
    out.push_back({"h gaps decreasing", worst_increase_ratio(r.successive_l2q_gaps), 1.0,
                   strictly_decreasing(r.successive_l2q_gaps)});
    out.push_back({"h_x gaps decreasing", worst_increase_ratio(r.successive_hx_gaps), 1.0,
                   strictly_decreasing(r.successive_hx_gaps)});
    return out;
}

std::vector<CheckLine> check_b_sweep(const SweepResult& r, double spread_limit) {
    std::vector<CheckLine> out;
    out.push_back({"members finite", static_cast<double>(r.diagnostics.size()), 0.0, !r.any_diverged()});
    out.push_back({"gaps decreasing", worst_increase_ratio(r.successive_l2q_gaps), 1.0,
                   strictly_decreasing(r.successive_l2q_gaps)});
    double worst_drop = 0.0;
    bool corners_ok = true;
    for (std::size_t m = 1; m < r.corner_metrics.size(); ++m) {
        const double prev = r.corner_metrics[m - 1];
        const double cur = r.corner_metrics[m];
        worst_drop = std::max(worst_drop, prev - cur);
        if (!(cur >= prev)) corners_ok = false;
    }
    out.push_back({"corner nondecreasing", worst_drop, 0.0, corners_ok});
    const double spread = spread_ratio(r.flux_time_norms);
    out.push_back({"flux-time norm spread", spread, spread_limit, all_finite(r.flux_time_norms) && spread <= spread_limit});
    return out;
}

Field flat_bump(const Grid& grid) {
    const double omega = 2.0 * std::numbers::pi / grid.length();
    return Field::sample(grid, [&](double x) {
        const double s = std::max(0.0, std::sin(omega * (x - grid.a)));
        return s * s;
    });
}

}  // namespace gbevolve
