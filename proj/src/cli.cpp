#include "gbevolve/io.hpp"

#include "gbevolve/monitors.hpp"
#include "gbevolve/stress.hpp"
#include "gbevolve/studies.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace gbevolve {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config = 2;

struct Options {
    std::string config_path;
    std::string output_dir;
    bool force = false;
    bool quiet = false;
};

RunConfig load(const Options& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (!opt.output_dir.empty()) cfg.output_dir = opt.output_dir;
    if (opt.force) cfg.force = true;
    return cfg;
}

bool print_checks(const std::vector<CheckLine>& checks, std::ostream& os) {
    bool ok = true;
    for (const auto& c : checks) {
        char line[160];
        std::snprintf(line, sizeof line, "%-28s %14.6e  bound %12.4e  %s", c.name.c_str(), c.value, c.bound,
                      c.passed ? "PASS" : "FAIL");
        os << line << '\n';
        ok = ok && c.passed;
    }
    return ok;
}

void print_report(const EstimateReport& r, std::ostream& os) {
    for (const auto& [name, value] : r.entries()) {
        char line[96];
        std::snprintf(line, sizeof line, "  %-16s %.10e", name.c_str(), value);
        os << line << '\n';
    }
}

double mean(const Field& f) { return integrate(f) / f.grid().length(); }

int cmd_simulate(const Options& opt) {
    const RunConfig cfg = load(opt);
    const Field h0 = make_initial_field(cfg);
    const Trajectory traj = run(h0, cfg.params, cfg.stepper, cfg.force);
    const fs::path dir = cfg.output_dir;
    write_trajectory_csv(traj, dir / "trajectory.csv");
    const EstimateReport report = build_report(traj);
    write_report_json(report, cfg, dir / "report.json", &traj);

    const Field& h = traj.final_state();
    const auto [lo, hi] = std::minmax_element(h.values().begin(), h.values().end());
    std::cout << "run " << cfg.run_id << "  t = " << format_double(traj.final_time())
              << "  steps = " << traj.dt_history.size() << '\n'
              << "final h: min " << format_double(*lo) << "  max " << format_double(*hi) << "  mean "
              << format_double(mean(h)) << '\n';
    if (!opt.quiet) print_report(report, std::cout);
    std::cout << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "report.json").string() << '\n';
    if (traj.diverged) {
        std::cerr << "run diverged: " << traj.diagnostic << '\n';
        return exit_check_failed;
    }
    return exit_ok;
}

// Invariants that hold for every run, plus the conservative ones when the
// zeroth-order term is off.
std::vector<CheckLine> estimate_checks(const Trajectory& traj, const EstimateReport& report) {
    std::vector<CheckLine> out;
    out.push_back({"run completed", traj.final_time(), traj.final_time(), !traj.diverged});
    bool finite = true;
    for (const auto& [name, value] : report.entries()) {
        if (name == "mixed_energy") continue;
        finite = finite && std::isfinite(value) && value >= 0.0;
    }
    out.push_back({"report finite, nonnegative", 0.0, 0.0, finite});
    const double ht_bound = rhs_l43_bound(traj);
    out.push_back({"l43_ht <= rhs bound", report.l43_ht, 1.1 * ht_bound + 1e-12,
                   report.l43_ht <= 1.1 * ht_bound + 1e-12});

    const ModelParams& p = traj.params;
    if (p.alpha2 == 0.0 && p.alpha3 == 0.0 && !traj.snapshots.empty()) {
        const Field& h0 = traj.snapshots.front().h;
        const double m0 = integrate(h0);
        double drift = 0.0;
        double l2_rise = 0.0;
        double prev_l2 = lp_norm(h0, 2.0);
        const auto [lo0, hi0] = std::minmax_element(h0.values().begin(), h0.values().end());
        double overshoot = 0.0;
        for (const auto& s : traj.snapshots) {
            drift = std::max(drift, std::abs(integrate(s.h) - m0));
            const double l2 = lp_norm(s.h, 2.0);
            l2_rise = std::max(l2_rise, l2 - prev_l2);
            prev_l2 = l2;
            const auto [lo, hi] = std::minmax_element(s.h.values().begin(), s.h.values().end());
            overshoot = std::max({overshoot, *hi - *hi0, *lo0 - *lo});
        }
        const double mass_tol = 1e-10 * std::max(1.0, lp_norm(h0, 1.0));
        out.push_back({"mass drift", drift, mass_tol, drift <= mass_tol});
        out.push_back({"L2 norm nonincreasing", l2_rise, 1e-10, l2_rise <= 1e-10});
        out.push_back({"max principle", overshoot, 1e-8, overshoot <= 1e-8});
    }
    return out;
}

int cmd_verify(const Options& opt) {
    const RunConfig cfg = load(opt);
    const Field h0 = make_initial_field(cfg);
    const Trajectory traj = run(h0, cfg.params, cfg.stepper, cfg.force);
    const EstimateReport report = build_report(traj);
    const fs::path dir = cfg.output_dir;
    write_trajectory_csv(traj, dir / "trajectory.csv");
    write_report_json(report, cfg, dir / "report.json", &traj);

    std::cout << "run " << cfg.run_id << "  t = " << format_double(traj.final_time()) << '\n';
    print_report(report, std::cout);
    if (traj.snapshots.size() >= 2) {
        std::cout << "  weak residual    " << weak_residual_family(traj, traj.params, false) << " (informational)\n";
    }
    const bool ok = print_checks(estimate_checks(traj, report), std::cout);
    if (!ok) std::cerr << "verify-estimates: at least one check failed\n";
    return ok ? exit_ok : exit_check_failed;
}

json sweep_to_json(const SweepResult& r, const std::vector<CheckLine>& checks) {
    json j;
    j["schema_version"] = report_schema_version;
    j["axis"] = r.axis == SweepAxis::kappa ? "kappa" : "B";
    j["values"] = r.values;
    j["corner_metrics"] = r.corner_metrics;
    j["flux_time_norms"] = r.flux_time_norms;
    j["successive_l2q_gaps"] = r.successive_l2q_gaps;
    j["successive_hx_gaps"] = r.successive_hx_gaps;
    j["successive_abs_gaps"] = r.successive_abs_gaps;
    j["gap_to_zero"] = r.gap_to_zero ? json(*r.gap_to_zero) : json(nullptr);
    j["diagnostics"] = r.diagnostics;
    json list = json::array();
    for (const auto& c : checks) list.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"passed", c.passed}});
    j["checks"] = list;
    return j;
}

void write_members(const SweepResult& r, const RunConfig& cfg) {
    for (std::size_t m = 0; m < r.trajectories.size(); ++m) {
        RunConfig member = cfg;
        member.params = r.trajectories[m].params;
        member.stepper.sigma_method = r.trajectories[m].sigma_method;
        char name[32];
        std::snprintf(name, sizeof name, "member_%02zu", m);
        const fs::path dir = fs::path(cfg.output_dir) / name;
        write_trajectory_csv(r.trajectories[m], dir / "trajectory.csv");
        write_report_json(r.reports[m], member, dir / "report.json", &r.trajectories[m]);
    }
}

void print_sweep(const SweepResult& r, std::ostream& os) {
    const char* axis = r.axis == SweepAxis::kappa ? "kappa" : "B";
    for (std::size_t m = 0; m < r.values.size(); ++m) {
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %-10g corner %.6e  flux-time %.6e  sup|h|^2 %.6e", axis, r.values[m],
                      r.corner_metrics[m], r.flux_time_norms[m], r.reports[m].sup_l2_h);
        os << line << '\n';
    }
    for (std::size_t m = 0; m < r.successive_l2q_gaps.size(); ++m) {
        char line[128];
        std::snprintf(line, sizeof line, "gap %zu-%zu  h %.6e  h_x %.6e  |h_x| %.6e", m, m + 1,
                      r.successive_l2q_gaps[m], r.successive_hx_gaps[m], r.successive_abs_gaps[m]);
        os << line << '\n';
    }
    if (r.gap_to_zero) os << "gap to B = 0  " << *r.gap_to_zero << '\n';
    for (const auto& d : r.diagnostics) std::cerr << "diverged " << d << '\n';
}

int finish_sweep(const SweepResult& r, const RunConfig& cfg, const std::vector<CheckLine>& checks) {
    write_members(r, cfg);
    const fs::path path = fs::path(cfg.output_dir) / "sweep.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << sweep_to_json(r, checks).dump(2) << '\n';
    print_sweep(r, std::cout);
    const bool ok = print_checks(checks, std::cout);
    if (!ok) std::cerr << "sweep: at least one check failed\n";
    return ok ? exit_ok : exit_check_failed;
}

int cmd_sweep_kappa(const Options& opt) {
    const RunConfig cfg = load(opt);
    const Field h0 = make_initial_field(cfg);
    if (!cfg.force) {
        const auto v = validate_initial_data(h0, cfg.params);
        if (!v.passed()) throw ConfigError("initial data rejected: " + v.failures.front());
    }
    const SweepResult r = kappa_sweep(h0, cfg.params, cfg.stepper, cfg.kappas);
    return finish_sweep(r, cfg, check_kappa_sweep(r));
}

int cmd_sweep_b(const Options& opt) {
    const RunConfig cfg = load(opt);
    const Field h0 = make_initial_field(cfg);
    if (!cfg.force) {
        const auto v = validate_initial_data(h0, cfg.params);
        if (!v.passed()) throw ConfigError("initial data rejected: " + v.failures.front());
    }
    const SweepResult r = b_sweep(h0, cfg.params, cfg.stepper, cfg.bs, cfg.include_zero);
    return finish_sweep(r, cfg, check_b_sweep(r));
}

int cmd_twin(const Options& opt) {
    const RunConfig cfg = load(opt);
    if (!(cfg.params.cap_b > 0.0)) throw ConfigError("twin-stability needs B > 0");
    const Field h0 = make_initial_field(cfg);
    const Field h1 = h0 + twin_perturbation(cfg.grid, cfg.twin_delta);
    const auto gaps = twin_stability(h0, h1, cfg.params, cfg.stepper);
    const auto same = twin_stability(h0, h0, cfg.params, cfg.stepper);
    double same_max = 0.0;
    for (const auto& g : same) same_max = std::max(same_max, g.l2_gap);
    const GronwallCheck fit = gronwall_split_check(gaps, cfg.twin_delta);

    const fs::path path = fs::path(cfg.output_dir) / "twin.csv";
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "t,l2_gap\n";
    for (const auto& g : gaps) out << format_double(g.t) << ',' << format_double(g.l2_gap) << '\n';
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");

    std::cout << "delta " << cfg.twin_delta << "  fitted C " << fit.rate << "  final gap "
              << (gaps.empty() ? 0.0 : gaps.back().l2_gap) << '\n';
    const std::vector<CheckLine> checks{
        {"envelope on second half", fit.worst_ratio, 1.0, fit.passed},
        {"identical twin gap", same_max, 1e-13, same_max <= 1e-13},
    };
    const bool ok = print_checks(checks, std::cout);
    if (!ok) std::cerr << "twin-stability: at least one check failed\n";
    return ok ? exit_ok : exit_check_failed;
}

int cmd_hilbert(std::size_t n, int image_terms) {
    const Grid grid = make_grid(0.0, 2.0 * std::numbers::pi, n);
    const Field hx = Field::sample(grid, [](double x) { return std::cos(x); });
    const Field exact = Field::sample(grid, [](double x) { return std::numbers::pi * std::sin(x); });
    ModelParams params;
    params.image_terms = image_terms;
    const Field direct = sigma_total(hx, params, SigmaMethod::direct());
    const Field spectral = sigma_total(hx, params, SigmaMethod::spectral());

    std::cout << "sigma of h_x = cos(x) on (0, 2 pi), n = " << n << ", image terms = " << image_terms << '\n';
    std::cout << "         x         direct       spectral      pi sin(x)\n";
    for (std::size_t j = 0; j < n; j += n / 8) {
        char line[96];
        std::snprintf(line, sizeof line, "%10.6f  %13.9f  %13.9f  %13.9f", grid.x(j), direct[j], spectral[j], exact[j]);
        std::cout << line << '\n';
    }
    const double direct_err = linf_norm(direct - exact);
    const double spectral_err = linf_norm(spectral - exact);
    const Field images = sigma_i1_images(hx, 1.0, image_terms);
    const Field images_far = sigma_i1_images(hx, 1.0, 4 * image_terms);
    const double tail = linf_norm(images - images_far);
    const double tail_bound = image_tail_bound(hx, 1.0, image_terms);
    const double trunc_gap = linf_norm(sigma_i2_truncated(hx, 1.0, 0.5 * grid.dx()) - sigma_i2_direct(hx, 1.0));

    std::vector<CheckLine> checks{
        {"direct vs pi sin", direct_err, 1e-2, direct_err <= 1e-2},
        {"spectral vs pi sin", spectral_err, 1e-12, spectral_err <= 1e-12},
        {"image tail within bound", tail, tail_bound, tail <= tail_bound},
        {"truncation below dx", trunc_gap, 1e-12, trunc_gap <= 1e-12},
    };

    // Boundedness battery on a zero-mean square wave.
    const Field square = Field::sample(grid, [](double x) { return x < std::numbers::pi ? 1.0 : -1.0; });
    std::vector<double> eps;
    for (int k = 0; k <= 8; ++k) eps.push_back(0.5 * std::ldexp(1.0, -k));
    std::cout << "\nL^p probe, square wave: ||sigma_i2,eps f||_p / ||f||_p\n";
    std::cout << "     eps          p=4/3            p=2            p=3\n";
    std::vector<std::vector<LpProbeRow>> rows;
    for (double p : {4.0 / 3.0, 2.0, 3.0}) rows.push_back(lp_boundedness_probe(square, p, eps));
    for (std::size_t k = 0; k < eps.size(); ++k) {
        char line[96];
        std::snprintf(line, sizeof line, "%10.6f  %13.6f  %13.6f  %13.6f", eps[k], rows[0][k].ratio, rows[1][k].ratio,
                      rows[2][k].ratio);
        std::cout << line << '\n';
    }
    const char* names[] = {"probe spread p=4/3", "probe spread p=2", "probe spread p=3"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<double> ratios;
        for (const auto& r : rows[i]) ratios.push_back(r.ratio);
        const double s = spread_ratio(ratios);
        checks.push_back({names[i], s, 4.0, s <= 4.0});
    }
    std::cout << '\n';
    const bool ok = print_checks(checks, std::cout);
    if (!ok) std::cerr << "hilbert-test: at least one check failed\n";
    return ok ? exit_ok : exit_check_failed;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Grain-boundary migration with disconnection stress: simulation and verification studies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version);

    Options opt;
    std::size_t hilbert_n = 512;
    int hilbert_images = 256;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("-o,--output-dir", opt.output_dir, "Override output_dir from the config");
        sub->add_flag("--force", opt.force, "Run even if the initial data fails validation");
        sub->add_flag("-q,--quiet", opt.quiet, "Less output");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "Run one trajectory, write CSV and report");
    CLI::App* sweep_kappa = app.add_subcommand("sweep-kappa", "Regularization sweep over kappas");
    CLI::App* sweep_b = app.add_subcommand("sweep-b", "Disconnection-density sweep over bs, optionally B = 0");
    CLI::App* verify = app.add_subcommand("verify-estimates", "Run, build the estimate report, check invariants");
    CLI::App* twin = app.add_subcommand("twin-stability", "Perturbed twin runs and the exponential envelope");
    CLI::App* hilbert = app.add_subcommand("hilbert-test", "Stress oracle cross-checks and L^p probe battery");
    for (auto* sub : {simulate, sweep_kappa, sweep_b, verify, twin}) add_common(sub);
    hilbert->add_option("-n,--points", hilbert_n, "Grid points")->check(CLI::Range(8, 1 << 16));
    hilbert->add_option("--image-terms", hilbert_images, "Periodic images per side")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*simulate) return cmd_simulate(opt);
        if (*sweep_kappa) return cmd_sweep_kappa(opt);
        if (*sweep_b) return cmd_sweep_b(opt);
        if (*verify) return cmd_verify(opt);
        if (*twin) return cmd_twin(opt);
        if (*hilbert) return cmd_hilbert(hilbert_n, hilbert_images);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
    return exit_config;
}

}  // namespace gbevolve
