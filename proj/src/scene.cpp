// SPDX-License-Identifier: Apache-2.0

#include "dirs/scene.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dirs {

PhaseResolution PhaseResolution::with_bits(int bits) {
    if (bits < 1 || bits > 62) throw DomainError("phase resolution needs 1..62 bits, got " + std::to_string(bits));
    return PhaseResolution(bits);
}

double SceneConfig::rician_factor(int n) const {
    if (rician_factors.size() == 1) return rician_factors.front();
    return rician_factors.at(static_cast<std::size_t>(n));
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("scene." + field + ": " + why);
}

}  // namespace

void validate(const SceneConfig& cfg) {
    require(cfg.n_antennas >= 1, "n_antennas", "must be positive");
    require(cfg.n_users >= 1, "n_users", "must be positive");
    require(cfg.n_dirs_elements >= 0, "n_dirs_elements", "must be non-negative");
    require(cfg.n_antennas > cfg.n_users, "n_antennas", "must exceed n_users");
    require(cfg.lu_region_radius > 0.0, "lu_region_radius", "must be positive");
    require(cfg.theta_a > 0.0 && cfg.theta_a <= std::numbers::pi, "theta_a", "must lie in (0, pi]");
    require(cfg.bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
    require(cfg.element_spacing_over_wavelength > 0.0, "element_spacing_over_wavelength", "must be positive");
    require(cfg.trials >= 1, "trials", "must be at least 1");
    require(cfg.phase_distribution.support > 0.0 && cfg.phase_distribution.support <= 1.0,
            "phase_support", "must lie in (0, 1]");
    require(cfg.rician_factors.size() == 1 ||
                cfg.rician_factors.size() == static_cast<std::size_t>(cfg.n_antennas),
            "rician_factors", "needs 1 or n_antennas entries");
    for (double e : cfg.rician_factors) require(e >= 0.0 && std::isfinite(e), "rician_factors", "entries must be finite and >= 0");
    require((cfg.bs_position - cfg.dirs_position).norm() > 0.0, "dirs_position", "coincides with bs_position");
    for (double v : {cfg.p_d_dbm, cfg.p_j_dbm}) require(std::isfinite(v), "p_d_dbm/p_j_dbm", "must be finite");
}

double LargeScaleGains::cascade_sum() const {
    return l_g * std::accumulate(l_i.begin(), l_i.end(), 0.0);
}

std::vector<Vec3> place_users(const SceneConfig& cfg, RandomStream& rng) {
    std::vector<Vec3> users;
    users.reserve(static_cast<std::size_t>(cfg.n_users));
    for (int k = 0; k < cfg.n_users; ++k) {
        const double r = cfg.lu_region_radius * std::sqrt(uniform01(rng));
        const double a = 2.0 * std::numbers::pi * uniform01(rng);
        users.emplace_back(cfg.lu_region_center.x() + r * std::cos(a),
                           cfg.lu_region_center.y() + r * std::sin(a), cfg.lu_region_center.z());
    }
    return users;
}

namespace {

double checked_log10_distance(double d) {
    if (!(d > 0.0)) throw DomainError("path loss needs a positive distance, got " + std::to_string(d));
    return std::log10(d);
}

}  // namespace

double path_loss_los_db(double distance_m) { return 35.6 + 22.0 * checked_log10_distance(distance_m); }

double path_loss_nlos_db(double distance_m) { return 32.6 + 36.7 * checked_log10_distance(distance_m); }

double noise_power_dbm(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
    return -170.0 + 10.0 * std::log10(bandwidth_hz);
}

double dbm_to_watts(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }

double db_to_linear_gain(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

LargeScaleGains large_scale(const SceneConfig& cfg, const std::vector<Vec3>& lu_positions) {
    LargeScaleGains g;
    g.l_g = db_to_linear_gain(path_loss_los_db((cfg.bs_position - cfg.dirs_position).norm()));
    g.l_d.reserve(lu_positions.size());
    g.l_i.reserve(lu_positions.size());
    for (const Vec3& p : lu_positions) {
        g.l_d.push_back(db_to_linear_gain(path_loss_nlos_db((cfg.bs_position - p).norm())));
        g.l_i.push_back(db_to_linear_gain(path_loss_nlos_db((cfg.dirs_position - p).norm())));
    }
    if (cfg.aj_position)
        g.l_j = db_to_linear_gain(path_loss_nlos_db((cfg.bs_position - *cfg.aj_position).norm()));
    return g;
}

}  // namespace dirs
