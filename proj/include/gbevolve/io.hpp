#pragma once

#include "gbevolve/core.hpp"
#include "gbevolve/evolution.hpp"
#include "gbevolve/monitors.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gbevolve {

inline constexpr int config_schema_version = 1;
inline constexpr int report_schema_version = 1;
inline constexpr int csv_schema_version = 1;
inline constexpr const char* code_version = "0.1.0";

/// Configuration problems: malformed JSON, unknown keys, out-of-range values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, resolved and validated. See README for the keys.
struct RunConfig {
    ModelParams params;
    Grid grid{0.0, 6.283185307179586, 256};
    StepperConfig stepper;
    std::string initial = "sine";  ///< constant | sine | multi_mode | flat_bump | file
    std::string initial_file;      ///< CSV with header "x,h", used when initial == "file"
    double amplitude = 1.0;
    std::size_t smooth_modes = 0;  ///< > 0: Fourier cutoff applied to h0
    std::string output_dir = "gbevolve_out";
    std::string run_id;            ///< derived from the config contents when not given
    std::vector<double> kappas{0.2, 0.1, 0.05, 0.025};
    std::vector<double> bs{0.5, 0.25, 0.125, 0.0625};
    bool include_zero = true;
    double twin_delta = 1e-3;
    bool force = false;            ///< run even if the initial data fails validation
};

/// Parses and validates a JSON config document. Unknown keys are errors;
/// syntax errors report line and column.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form of a config (all keys, defaults filled in).
nlohmann::json config_to_json(const RunConfig& cfg);

/// Builds h0 from the config's initial-datum selector.
Field make_initial_field(const RunConfig& cfg);

/// Header "t,x,h", one row per (snapshot, grid point), time-major, x ascending,
/// 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Reads a file written by write_trajectory_csv back onto the given grid.
Trajectory read_trajectory_csv(const std::filesystem::path& path, const Grid& grid);

/// Report plus provenance as one JSON object. The only run-dependent key that
/// is not a function of the config is "timestamp".
nlohmann::json report_to_json(const EstimateReport& report, const RunConfig& meta,
                              const Trajectory* traj = nullptr);

void write_report_json(const EstimateReport& report, const RunConfig& meta, const std::filesystem::path& path,
                       const Trajectory* traj = nullptr);

/// Shortest round-trip decimal with 17 significant digits.
std::string format_double(double v);

/// Command-line entry point; returns the process exit code
/// (0 ok, 1 failed check, 2 configuration error).
int cli_main(int argc, char** argv);

}  // namespace gbevolve
