// SPDX-License-Identifier: Apache-2.0
//
// Closed-form ergodic-rate lower bounds under DIRS jamming and the
// statistical identities they rest on. Inputs are linear watts / gains.

#pragma once

#include "dirs/scene.hpp"

#include <span>

namespace dirs {

struct BoundInput {
    int n_antennas = 0;
    int n_users = 0;
    int n_dirs_elements = 0;
    double p_d_watts = 0.0;
    double noise_watts = 0.0;
    LargeScaleGains gains;
    int target_user = 0;  ///< 0-based
};

/// log2(1 + p (N_t - 1) L_d,k / (p sum_{i!=k} L_d,i + p N_D sum_i L_G L_I,i + s2)).
/// Requires N_t >= 3.
double lower_bound_mrc(const BoundInput& in);

/// log2(1 + p (N_t - K) L_d,k / (p N_D sum_i L_G L_I,i + s2)). Requires N_t > K.
double lower_bound_zf(const BoundInput& in);

/// p-free limit of lower_bound_zf: log2(1 + (N_t - K) L_d,k / (N_D sum_i L_G L_I,i)).
double zf_interference_limited_rate(const BoundInput& in);

/// E[tr(W^{-1})] = m / (n - m) for an m x m central complex Wishart matrix with n > m degrees of freedom.
double wishart_trace_expect(int m, int n);

/// p N_D sum_i L_G L_I,i, the expected ACA interference power per unit-norm combiner.
double aca_interference_expect(const LargeScaleGains& gains, int n_dirs_elements, double p_d_watts);

/// Implicit Jensen bound log2(1 + 1 / mean(1/SINR)) from Monte Carlo samples of 1/SINR.
double jensen_bound_from_samples(std::span<const double> inverse_sinr);

}  // namespace dirs
