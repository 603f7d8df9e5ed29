#pragma once

#include "gbevolve/core.hpp"
#include "gbevolve/evolution.hpp"
#include "gbevolve/monitors.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gbevolve {

/// Sweep members run concurrently up to this many at once: GB_EVOLVE_THREADS
/// when set to a positive integer, otherwise the processor count.
int sweep_thread_cap();

/// Space-time L^2 distance sqrt(int int (f - g)^2) on the coarser of the two
/// snapshot lattices, the finer trajectory linearly interpolated in time.
/// The observable maps a snapshot to the field being compared.
double l2q_gap(const Trajectory& a, const Trajectory& b,
               const std::function<Field(const Field&, const ModelParams&)>& observable);

double l2q_gap_h(const Trajectory& a, const Trajectory& b);
double l2q_gap_hx(const Trajectory& a, const Trajectory& b);
/// Compares |h_x|_kappa, each trajectory with its own kappa.
double l2q_gap_abs_hx(const Trajectory& a, const Trajectory& b);

enum class SweepAxis { kappa, cap_b };

struct SweepResult {
    SweepAxis axis = SweepAxis::kappa;
    std::vector<double> values;               ///< parameter level of each member
    std::vector<Trajectory> trajectories;
    std::vector<EstimateReport> reports;
    std::vector<double> corner_metrics;
    std::vector<double> flux_time_norms;      ///< flux_time_derivative_norm per member
    /// Successive gaps between members m and m+1 over the halving levels.
    std::vector<double> successive_l2q_gaps;
    std::vector<double> successive_hx_gaps;
    std::vector<double> successive_abs_gaps;  ///< |h_x|_kappa observable
    /// b_sweep with include_zero: gap between the smallest positive B and B = 0.
    std::optional<double> gap_to_zero;
    std::vector<std::string> diagnostics;     ///< one entry per diverged member

    bool any_diverged() const { return !diagnostics.empty(); }
};

/// Runs one member per kappa (strictly decreasing, positive) on a shared grid
/// and stepper configuration.
SweepResult kappa_sweep(const Field& h0, const ModelParams& base, const StepperConfig& cfg,
                        const std::vector<double>& kappas);

/// Runs one member per B (strictly decreasing, positive); include_zero appends
/// a B = kappa = 0 member whose gap is reported separately in gap_to_zero.
SweepResult b_sweep(const Field& h0, const ModelParams& base, const StepperConfig& cfg, const std::vector<double>& bs,
                    bool include_zero);

struct TwinGap {
    double t;
    double l2_gap;
};

/// ||h_a(t) - h_b(t)|| at the snapshot times of the two runs (B > 0 required).
std::vector<TwinGap> twin_stability(const Field& h0a, const Field& h0b, const ModelParams& params,
                                    const StepperConfig& cfg);

/// Smallest C >= 0 with gap(t) <= delta e^{C t} on the given samples (t > 0 only).
double fit_gronwall_rate(const std::vector<TwinGap>& gaps, double delta);

/// Perturbation of L^2 norm delta along cos(4 pi (x - a) / L).
Field twin_perturbation(const Grid& grid, double delta);

struct GronwallCheck {
    double rate = 0.0;          ///< C fitted on samples with t <= split
    double worst_ratio = 0.0;   ///< max gap / (delta e^{C t}) over samples with t > split
    bool passed = false;
};

/// Fits C on the first half of the samples (t <= t_final / 2) and checks the
/// envelope delta e^{C t} on the second half.
GronwallCheck gronwall_split_check(const std::vector<TwinGap>& gaps, double delta);

/// One line of a pass/fail table.
struct CheckLine {
    std::string name;
    double value;
    double bound;
    bool passed;
};

/// max/min of a list of nonnegative numbers; 1 when all are zero, infinity
/// when only some are.
double spread_ratio(const std::vector<double>& v);

bool strictly_decreasing(const std::vector<double>& v);

/// Report spread, divergence and gap monotonicity of a kappa sweep.
std::vector<CheckLine> check_kappa_sweep(const SweepResult& r, double spread_limit = 4.0);

/// Gap monotonicity over the positive levels, corner growth as B decreases
/// (B = 0 included), flux-time norm finite with bounded spread.
std::vector<CheckLine> check_b_sweep(const SweepResult& r, double spread_limit = 4.0);

/// Corner-forming datum max(0, sin)^2 on the grid's period; C^1 with flat parts.
Field flat_bump(const Grid& grid);

}  // namespace gbevolve
