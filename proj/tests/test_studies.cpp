#include <doctest.h>

#include "gbevolve/studies.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

using namespace gbevolve;

namespace {

constexpr double pi = std::numbers::pi;

Grid circle(std::size_t n) { return make_grid(0.0, 2.0 * pi, n); }

Field sine(const Grid& g) {
    return Field::sample(g, [](double x) { return std::sin(x); });
}

ModelParams dominance_params() {
    ModelParams p;
    p.alpha1 = 1.0;
    p.alpha2 = 0.05;
    p.alpha3 = 0.1;
    p.cap_b = 0.5;
    p.image_terms = 16;
    return p;
}

StepperConfig lattice(double t_end, double interval, Scheme scheme = Scheme::semi_implicit) {
    StepperConfig cfg;
    cfg.scheme = scheme;
    cfg.t_end = t_end;
    cfg.snapshot_interval = interval;
    return cfg;
}

}  // namespace

TEST_CASE("thread cap honours the environment") {
    setenv("GB_EVOLVE_THREADS", "3", 1);
    CHECK(sweep_thread_cap() == 3);
    setenv("GB_EVOLVE_THREADS", "zero", 1);
    CHECK(sweep_thread_cap() >= 1);
    unsetenv("GB_EVOLVE_THREADS");
    CHECK(sweep_thread_cap() >= 1);
}

TEST_CASE("space-time gaps") {
    const Grid g = circle(32);
    const Field zero = Field::constant(g, 0.0);
    // h = t on a coarse lattice, h = 0 on a finer one.
    Trajectory a{ModelParams{}, g, SigmaMethod::direct(), {}, {}, false, {}};
    Trajectory b = a;
    for (int m = 0; m <= 4; ++m) a.snapshots.push_back({0.25 * m, Field::constant(g, 0.25 * m)});
    for (int m = 0; m <= 8; ++m) b.snapshots.push_back({0.125 * m, zero});
    CHECK(l2q_gap_h(a, a) == 0.0);
    const double gap = l2q_gap_h(a, b);
    CHECK(gap == doctest::Approx(l2q_gap_h(b, a)));
    // Trapezoid of t^2 |Omega| on the coarse lattice.
    const double expected = std::sqrt(2 * pi * 0.25 * (0.5 * 0.0 + 0.0625 + 0.25 + 0.5625 + 0.5 * 1.0));
    CHECK(gap == doctest::Approx(expected).epsilon(1e-12));
    CHECK(l2q_gap_hx(a, b) == 0.0);
    Trajectory other = b;
    other.grid = circle(64);
    CHECK_THROWS_AS(l2q_gap_h(a, other), InvalidArgument);
}

TEST_CASE("kappa sweep") {
    const Grid g = circle(128);
    const std::vector<double> kappas{0.2, 0.1, 0.05, 0.025};
    StepperConfig cfg = lattice(1.0, 0.05);
    cfg.sigma_method = SigmaMethod::truncated();
    const SweepResult r = kappa_sweep(sine(g), dominance_params(), cfg, kappas);
    CHECK_FALSE(r.any_diverged());
    REQUIRE(r.trajectories.size() == 4);
    CHECK(r.successive_l2q_gaps.size() == 3);
    CHECK(strictly_decreasing(r.successive_l2q_gaps));
    CHECK(strictly_decreasing(r.successive_hx_gaps));
    CHECK(strictly_decreasing(r.successive_abs_gaps));
    for (const auto& c : check_kappa_sweep(r)) {
        CAPTURE(c.name);
        CHECK(c.passed);
    }

    SUBCASE("limits commute at this resolution") {
        ModelParams p = dominance_params();
        p.kappa = 0.0;
        const Trajectory direct = run(sine(g), p, lattice(1.0, 0.05));
        CHECK(l2q_gap_h(r.trajectories.back(), direct) < r.successive_l2q_gaps.back());
    }
}

TEST_CASE("kappa sweep edge cases") {
    const Grid g = circle(64);
    StepperConfig cfg = lattice(0.2, 0.1);
    const SweepResult single = kappa_sweep(sine(g), dominance_params(), cfg, {0.1});
    CHECK(single.successive_l2q_gaps.empty());
    CHECK_THROWS_AS(kappa_sweep(sine(g), dominance_params(), cfg, {0.1, 0.2}), InvalidArgument);
    CHECK_THROWS_AS(kappa_sweep(sine(g), dominance_params(), cfg, {0.1, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(kappa_sweep(sine(g), dominance_params(), cfg, {}), InvalidArgument);
}

TEST_CASE("a failing member is recorded and the sweep goes on") {
    const Grid g = circle(64);
    std::vector<double> v(g.n, 0.0);
    v[0] = 10.0;
    const SweepResult r = kappa_sweep(Field(g, v), dominance_params(), lattice(0.2, 0.1), {0.2, 0.1});
    CHECK(r.trajectories.size() == 2);
    CHECK(r.diagnostics.size() == 2);
    CHECK(r.trajectories[0].diverged);
}

TEST_CASE("B sweep from a smooth datum") {
    const Grid g = circle(128);
    ModelParams p = dominance_params();
    p.alpha2 = 0.0;
    const SweepResult r = b_sweep(sine(g), p, lattice(1.0, 0.05, Scheme::explicit_euler), {0.5, 0.25, 0.125, 0.0625}, false);
    CHECK(strictly_decreasing(r.successive_l2q_gaps));
    CHECK_FALSE(r.gap_to_zero.has_value());
    CHECK(r.values.size() == 4);
}

TEST_CASE("B sweep on the corner-forming datum, down to B = 0") {
    const Grid g = circle(128);
    ModelParams p = dominance_params();
    p.alpha2 = 0.0;
    const SweepResult r = b_sweep(flat_bump(g), p, lattice(1.0, 0.05, Scheme::explicit_euler), {0.5, 0.25, 0.125, 0.0625}, true);
    REQUIRE(r.values.size() == 5);
    CHECK(r.values.back() == 0.0);
    CHECK(r.trajectories.back().params.kappa == 0.0);
    for (std::size_t m = 1; m < r.corner_metrics.size(); ++m) CHECK(r.corner_metrics[m] >= r.corner_metrics[m - 1]);
    CHECK(r.gap_to_zero.has_value());
    for (const auto& c : check_b_sweep(r)) {
        CAPTURE(c.name);
        CHECK(c.passed);
    }
}

TEST_CASE("B = 0 member on a constant datum: closed-form gap") {
    const Grid g = circle(32);
    ModelParams p;
    p.alpha3 = 0.7;
    const double t_end = 1.0;
    const SweepResult r = b_sweep(Field::constant(g, 1.0), p, lattice(t_end, 0.01), {0.5, 0.25}, true);
    for (double v : r.trajectories.back().final_state().values()) CHECK(v == doctest::Approx(1.0));
    // h_B - h_0 = -alpha3 B t: sqrt(|Omega| alpha3^2 B^2 T^3 / 3).
    const double exact = 0.7 * 0.25 * std::sqrt(2 * pi * t_end * t_end * t_end / 3.0);
    CHECK(*r.gap_to_zero == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("twin stability") {
    const Grid g = circle(128);
    const ModelParams p = dominance_params();
    const StepperConfig cfg = lattice(1.0, 0.05);
    const Field h0 = sine(g);

    SUBCASE("identical inputs") {
        for (const auto& gap : twin_stability(h0, h0, p, cfg)) CHECK(gap.l2_gap <= 1e-13);
    }
    SUBCASE("perturbation size and envelope") {
        const double delta = 1e-3;
        const Field bump = twin_perturbation(g, delta);
        double s = 0.0;
        for (double v : bump.values()) s += v * v;
        CHECK(std::sqrt(s * g.dx()) == doctest::Approx(delta).epsilon(1e-12));

        const auto gaps = twin_stability(h0, h0 + bump, p, cfg);
        CHECK(gaps.front().l2_gap == doctest::Approx(delta).epsilon(1e-12));
        const GronwallCheck fit = gronwall_split_check(gaps, delta);
        CHECK(fit.passed);
        CHECK(fit.rate >= 0.0);

        const auto half = twin_stability(h0, h0 + twin_perturbation(g, delta / 2), p, cfg);
        const double ratio = gaps.back().l2_gap / half.back().l2_gap;
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 2.5);
    }
    SUBCASE("needs B > 0") {
        ModelParams q = p;
        q.cap_b = 0.0;
        CHECK_THROWS_AS(twin_stability(h0, h0, q, cfg), InvalidArgument);
    }
}

TEST_CASE("Gronwall fit") {
    const double delta = 0.01;
    std::vector<TwinGap> gaps;
    for (int m = 0; m <= 10; ++m) gaps.push_back({0.1 * m, delta * std::exp(0.3 * 0.1 * m)});
    CHECK(fit_gronwall_rate(gaps, delta) == doctest::Approx(0.3));
    const GronwallCheck c = gronwall_split_check(gaps, delta);
    CHECK(c.rate == doctest::Approx(0.3));
    CHECK(c.passed);
    // Faster growth later than early on is caught.
    gaps.back().l2_gap *= 2.0;
    CHECK_FALSE(gronwall_split_check(gaps, delta).passed);
    CHECK_THROWS_AS(fit_gronwall_rate(gaps, 0.0), InvalidArgument);
}

TEST_CASE("small helpers") {
    CHECK(spread_ratio({2.0, 4.0, 3.0}) == 2.0);
    CHECK(spread_ratio({0.0, 0.0}) == 1.0);
    CHECK(std::isinf(spread_ratio({0.0, 1.0})));
    CHECK(strictly_decreasing({3.0, 2.0, 1.0}));
    CHECK_FALSE(strictly_decreasing({3.0, 3.0}));
    CHECK(strictly_decreasing({}));
}

TEST_CASE("flat bump") {
    const Grid g = circle(256);
    const Field f = flat_bump(g);
    for (std::size_t j = g.n / 2 + 1; j < g.n; ++j) CHECK(f[j] == 0.0);
    CHECK(f[g.n / 4] == doctest::Approx(1.0));
    CHECK(validate_initial_data(f, ModelParams{}).passed());
}
