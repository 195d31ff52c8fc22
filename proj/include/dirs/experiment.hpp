// SPDX-License-Identifier: Apache-2.0
//
// Experiment sweeps: configuration loading, grid evaluation and CSV/JSON
// result emission.
//
// Config file (JSON, all keys optional, unknown keys rejected):
//
//   {
//     "experiment": "power_sweep",           // see ExperimentId
//     "grid": [-20, -10, 0, 10],             // strictly ascending
//     "scenarios": ["nojam_zf", "dirs_zf", "aj_zf@4"],
//     "bounds": ["prop3", "nojam_zf_bound"],
//     "workers": 0,
//     "scene": { "n_antennas": 256, "n_dirs_elements": 4096, "n_users": 8,
//                "bs_position": [0, 0, 2], "dirs_position": [-2, 0, 2],
//                "lu_region_center": [0, 160, 0], "lu_region_radius": 10,
//                "aj_position": [20, 160, 0],        // or null
//                "p_d_dbm": 0, "p_j_dbm": 4, "bandwidth_hz": 180000,
//                "rician_factors": 10,               // number or per-antenna array
//                "theta_a": 1.5707963267948966,
//                "element_spacing_over_wavelength": 0.5,
//                "phase_bits": 1,                    // or "continuous"
//                "phase_support": 1.0,
//                "trials": 500, "seed": 1,
//                "redraw_users_per_trial": false, "freeze_aoa": false }
//   }

#pragma once

#include "dirs/rate.hpp"
#include "dirs/scene.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dirs {

enum class ExperimentId { PowerSweep, NdSweep, BitsSweep, DbdSweep, NtSweep, NtNdLockedSweep, KSweep };

std::string_view to_string(ExperimentId id);
ExperimentId parse_experiment_id(std::string_view name);
/// Name of the swept variable written to the sweep_var column.
std::string_view sweep_variable(ExperimentId id);
std::vector<double> default_grid(ExperimentId id);

enum class BoundKind { Prop2, Prop3, NoJamZf, NoJamMrc };

std::string_view to_string(BoundKind b);
BoundKind parse_bound(std::string_view name);
/// The scenario whose rows carry this bound.
Scenario bound_scenario(BoundKind b);

inline constexpr int kSchemaVersion = 1;

struct ExperimentSpec {
    ExperimentId id = ExperimentId::PowerSweep;
    std::vector<double> grid;
    SceneConfig scene;
    std::vector<Scenario> scenarios;
    std::vector<BoundKind> bounds;
    unsigned workers = 0;
};

/// Spec with every documented default for `id`.
ExperimentSpec default_spec(ExperimentId id = ExperimentId::PowerSweep);

/// Scene for one grid point (N_D, bits, DIRS offset, ... substituted).
SceneConfig scene_at(const ExperimentSpec& spec, double sweep_value);

/// Throws ConfigError naming the offending field.
void validate(const ExperimentSpec& spec);

ExperimentSpec spec_from_json(const nlohmann::json& j, std::optional<ExperimentId> override_id = std::nullopt);
ExperimentSpec validate_and_load(const std::filesystem::path& path,
                                 std::optional<ExperimentId> override_id = std::nullopt);

nlohmann::json to_json(const SceneConfig& cfg);
nlohmann::json to_json(const ExperimentSpec& spec);

struct ResultRow {
    std::string experiment;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string scenario;
    std::string user;  ///< "1".."K" or "avg"
    double mean_rate = 0.0;
    double ci_half = 0.0;
    std::optional<double> bound;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;
    int redraws = 0;
};

/// Evaluates every grid point x scenario, rows ordered by sweep value,
/// scenario (spec order) and user (1..K then avg).
ExperimentOutput run_experiment(const ExperimentSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "experiment,sweep_var,sweep_value,scenario,user,mean_rate_bps_hz,ci_half,bound_bps_hz,trials,seed";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

}  // namespace dirs
