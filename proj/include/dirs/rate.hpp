// SPDX-License-Identifier: Apache-2.0
//
// Per-realization SINRs and the Monte Carlo ergodic-rate estimator.

#pragma once

#include "dirs/channel.hpp"
#include "dirs/common.hpp"
#include "dirs/detect.hpp"
#include "dirs/scene.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dirs {

// ---------------------------------------------------------------------------
// Single-realization SINRs. k is a 0-based user index. Powers in watts.

/// MRC under DIRS jamming:
///   p ||h_k||^4 / (p sum_{i!=k} |h_k^H h_i|^2 + p sum_i |h_k^H h_D,i|^2 + s2 ||h_k||^2).
/// Pass an all-zero (or 0-row-compatible zero) h_D for the unjammed case.
double sinr_mrc_dirs(const CMatrix& h_d, const CMatrix& h_dirs, Eigen::Index k, double p_d_watts,
                     double noise_watts);

/// ZF under DIRS jamming: p / (p sum_i |w_k^H h_D,i|^2 + s2 ||w_k||^2).
double sinr_zf_dirs(const DetectorMatrix& det, const CMatrix& h_dirs, Eigen::Index k, double p_d_watts,
                    double noise_watts);

/// Any linear detector under an active jammer:
///   p |w_k^H h_k|^2 / (p sum_{i!=k} |w_k^H h_i|^2 + p_J |w_k^H h_J|^2 + s2 ||w_k||^2).
double sinr_aj(const DetectorMatrix& det, const CMatrix& h_d, const CVector& h_j, Eigen::Index k,
               double p_d_watts, double p_j_watts, double noise_watts);

/// CSI-aware passive jammer: the detector sees h_d but the signal travels
/// over h_d + h_D (the per-user term of the PJ sum-rate objective).
double sinr_pj(const DetectorMatrix& det, const CMatrix& h_d, const CMatrix& h_dirs, Eigen::Index k,
               double p_d_watts, double noise_watts);

inline double rate_from_sinr(double sinr) { return std::log2(1.0 + sinr); }

// ---------------------------------------------------------------------------
// Scenarios

enum class JamKind { NoJam, DIRS, AJ, PJ };

struct Scenario {
    JamKind jam = JamKind::NoJam;
    DetectorKind detector = DetectorKind::ZF;
    /// AJ only; falls back to SceneConfig::p_j_dbm.
    std::optional<double> p_j_dbm;

    /// Canonical name, e.g. "nojam_zf", "dirs_mrc", "aj_zf@4", "pj_zf".
    std::string name() const;
    static Scenario parse(const std::string& name);
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct RateSample {
    std::vector<double> sinr;
    std::vector<double> rate;
    JamKind scenario = JamKind::NoJam;
};

struct ErgodicEstimate {
    std::vector<double> mean;      ///< per LU, bits/s/Hz
    std::vector<double> variance;  ///< per LU, sample variance over trials
    std::vector<double> ci_half;   ///< per LU, 1.96 sqrt(var / trials)
    double avg_mean = 0.0;         ///< K-average rate
    double avg_variance = 0.0;
    double avg_ci_half = 0.0;
    double sum_rate_mean = 0.0;
    int trials = 0;
};

/// Builds an estimate from a trials x K table (row-major, one row per trial).
ErgodicEstimate summarize(std::span<const double> rates, int trials, int n_users);

struct MonteCarloOptions {
    int trials = 500;
    std::uint64_t seed = 1;
    /// 0 means std::thread::hardware_concurrency().
    unsigned workers = 0;
    /// Every trial reuses trial 0's streams (degenerate check: variance 0).
    bool repeat_trial_seed = false;
    /// Maximum redraws of a single trial after ZF rank failures.
    int max_redraws = 100;
};

struct MonteCarloResult {
    /// estimates[p][s] for p_d grid index p and scenario index s.
    std::vector<std::vector<ErgodicEstimate>> estimates;
    LargeScaleGains gains;  ///< gains of the experiment-wide placement
    std::vector<Vec3> users;
    int redraws = 0;
};

/// Monte Carlo ergodic rates for every (p_d, scenario) pair. All pairs share
/// the same per-trial channels, phases and AJ channel. Results depend only on
/// (cfg, scenarios, p_d grid, trials, seed), never on the worker count.
MonteCarloResult estimate_ergodic(const SceneConfig& cfg, std::span<const Scenario> scenarios,
                                  std::span<const double> p_d_dbm, const MonteCarloOptions& opt);

/// Convenience: single p_d taken from cfg.
MonteCarloResult estimate_ergodic(const SceneConfig& cfg, std::span<const Scenario> scenarios,
                                  const MonteCarloOptions& opt);

}  // namespace dirs
