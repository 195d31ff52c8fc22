// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration, geometry and large-scale fading.
//
// All power arithmetic downstream of this header is in linear watts and
// linear gains; dBm / dB appear only in SceneConfig and at reporting time.

#pragma once

#include "dirs/common.hpp"
#include "dirs/random.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace dirs {

/// Phase-shift resolution of a reflecting surface: b bits or continuous.
class PhaseResolution {
public:
    static PhaseResolution continuous() { return PhaseResolution(0); }
    static PhaseResolution with_bits(int bits);

    bool is_continuous() const noexcept { return bits_ == 0; }
    /// Only meaningful when !is_continuous().
    int bits() const noexcept { return bits_; }
    /// Number of grid points, 2^b.
    std::uint64_t levels() const noexcept { return std::uint64_t{1} << bits_; }

    friend bool operator==(const PhaseResolution&, const PhaseResolution&) = default;

private:
    explicit PhaseResolution(int bits) : bits_(bits) {}
    int bits_;
};

/// Distribution of the random DIRS phases. Uniform is the default; a
/// truncated support restricts draws to [0, 2pi * support) (or the grid
/// points inside it) for the distribution-invariance experiments.
struct PhaseDistribution {
    double support = 1.0;  ///< fraction of the circle in (0, 1]
    friend bool operator==(const PhaseDistribution&, const PhaseDistribution&) = default;
};

struct SceneConfig {
    int n_antennas = 256;
    int n_dirs_elements = 4096;
    int n_users = 8;

    Vec3 bs_position{0.0, 0.0, 2.0};
    Vec3 dirs_position{-2.0, 0.0, 2.0};
    Vec3 lu_region_center{0.0, 160.0, 0.0};
    double lu_region_radius = 10.0;
    std::optional<Vec3> aj_position = Vec3{20.0, 160.0, 0.0};

    double p_d_dbm = 0.0;
    double p_j_dbm = 4.0;
    double bandwidth_hz = 180e3;

    /// Per-BS-antenna Rician factors; a single entry is broadcast to all antennas.
    std::vector<double> rician_factors{10.0};
    double theta_a = std::numbers::pi / 2.0;
    double element_spacing_over_wavelength = 0.5;

    PhaseResolution phase_resolution = PhaseResolution::with_bits(1);
    PhaseDistribution phase_distribution{};

    int trials = 500;
    std::uint64_t seed = 1;

    /// Draw LU positions for every trial instead of once per experiment.
    bool redraw_users_per_trial = false;
    /// Draw the AoAs once per scene instead of once per trial.
    bool freeze_aoa = false;

    /// Rician factor of BS antenna n (0-based), after broadcasting.
    double rician_factor(int n) const;
};

/// Throws ConfigError naming the first violated field.
void validate(const SceneConfig& cfg);

struct LargeScaleGains {
    double l_g = 0.0;
    std::vector<double> l_d;
    std::vector<double> l_i;
    std::optional<double> l_j;

    /// sum_i L_G * L_I,i, the per-element ACA power scale.
    double cascade_sum() const;
};

/// K points uniform over the LU disk (z fixed at the centre's z).
std::vector<Vec3> place_users(const SceneConfig& cfg, RandomStream& rng);

double path_loss_los_db(double distance_m);
double path_loss_nlos_db(double distance_m);
double noise_power_dbm(double bandwidth_hz);

double dbm_to_watts(double x_dbm);
/// Converts a path *loss* in dB to a multiplicative power gain.
double db_to_linear_gain(double loss_db);

LargeScaleGains large_scale(const SceneConfig& cfg, const std::vector<Vec3>& lu_positions);

inline double noise_watts(const SceneConfig& cfg) { return dbm_to_watts(noise_power_dbm(cfg.bandwidth_hz)); }

}  // namespace dirs
