#pragma once

#include "gbevolve/core.hpp"
#include "gbevolve/stress.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace gbevolve {

enum class Scheme { explicit_euler, semi_implicit };
enum class StabilityPolicy { enforce, warn };

std::string to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(const std::string& name);

struct StepperConfig {
    Scheme scheme = Scheme::semi_implicit;
    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 5e-2;
    double cfl_safety = 0.9;
    double t_end = 1.0;
    int snapshot_stride = 1;
    /// When positive, snapshots are taken at multiples of this time (steps are
    /// shortened to land on them) and snapshot_stride is ignored.
    double snapshot_interval = 0.0;
    SigmaMethod sigma_method = SigmaMethod::direct();
    /// Step-doubling tolerance of the semi-implicit controller (relative, max norm).
    double step_tolerance = 1e-5;
    /// Consecutive accepted steps before the controller doubles dt.
    int growth_after = 10;
    StabilityPolicy stability = StabilityPolicy::enforce;
    std::size_t max_steps = 20'000'000;

    void validate() const;
};

/// Keeps the explicit step finite when B = kappa = 0 and h is flat.
inline constexpr double floor_guard = 1e-12;

/// Spatial operator of the regularized equation on one grid. Holds the
/// precomputed stress kernel so repeated steps do not rebuild it.
class Evolver {
public:
    Evolver(const Grid& grid, const ModelParams& params, const SigmaMethod& method);

    /// alpha1 D-[F_kappa(D+h) + B D+h] + G(h).
    Field rhs(const Field& h) const;

    /// Zeroth-order forcing G(h) = -(alpha2 sigma(D0 h) + alpha3)(|D0 h|_kappa + B).
    Field forcing(const Field& h) const;

    /// Stress of the current profile, sigma(D0 h).
    Field stress(const Field& h) const;

    /// cfl * dx^2 / (2 alpha1 (max_faces |D+h|_kappa + B) + floor_guard).
    double stable_dt(const Field& h, double cfl_safety) const;

    Field step_explicit(const Field& h, double dt, StabilityPolicy policy = StabilityPolicy::enforce) const;

    /// (I - dt alpha1 A(h)) h_new = h + dt G(h), with A(h) the flux-form
    /// operator whose face coefficient is the secant F_kappa(p)/p + B at p = D+h.
    Field step_semi_implicit(const Field& h, double dt) const;

    const ModelParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    const SigmaMethod& method() const { return method_; }

private:
    Grid grid_;
    ModelParams params_;
    SigmaMethod method_;
    std::optional<StressOperator> stress_;
};

Field rhs(const Field& h, const ModelParams& params, const SigmaMethod& method);
double stable_dt(const Field& h, const ModelParams& params, double cfl_safety = 1.0);
Field step_explicit(const Field& h, double dt, const ModelParams& params, const SigmaMethod& method,
                    StabilityPolicy policy = StabilityPolicy::enforce);
Field step_semi_implicit(const Field& h, double dt, const ModelParams& params, const SigmaMethod& method);

/// Integrates from t = 0 to cfg.t_end. Initial data must pass
/// validate_initial_data unless force is set. A non-finite state stops the run
/// early with diverged = true and the last finite snapshot kept.
Trajectory run(const Field& h0, const ModelParams& params, const StepperConfig& cfg, bool force = false);

}  // namespace gbevolve
