// SPDX-License-Identifier: Apache-2.0
//
// Small-scale fading synthesis: Rician BS-DIRS link G, Rayleigh DIRS-LU
// link H_I and direct link H_d, and the DIRS-jammed cascade
// H_D = G^H diag(phi) H_I.
//
// Matrix shapes: G is N_D x N_t, H_I is N_D x K, H_d and H_D are N_t x K.

#pragma once

#include "dirs/common.hpp"
#include "dirs/random.hpp"
#include "dirs/scene.hpp"

#include <iosfwd>
#include <vector>

namespace dirs {

struct PhaseVector;

struct ChannelRealization {
    CMatrix g;
    CMatrix h_i;
    CMatrix h_d;
    LargeScaleGains gains;
    std::vector<double> aoa;
};

struct AjChannel {
    CVector h_j;
};

struct BsDirsChannel {
    CMatrix g;
    std::vector<double> aoa;
};

/// N_t x K; column k is sqrt(L_d,k) times CN(0, 1) entries.
CMatrix draw_direct(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng);

/// N_D x K; column k is sqrt(L_I,k) times CN(0, 1) entries.
CMatrix draw_dirs_lu(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng);

/// AoAs uniform on [-theta_A, theta_A], one per reflecting element.
std::vector<double> draw_aoa(const SceneConfig& cfg, RandomStream& rng);

/// Unit-modulus ULA steering matrix, [G^LOS]_rn = exp(j 2pi (d/lambda) n sin theta_r), n 0-based.
CMatrix los_matrix(const std::vector<double>& aoa, int n_antennas, double spacing_over_wavelength);

/// Rician G. When `aoa` is non-null it is used instead of drawing fresh angles.
BsDirsChannel draw_bs_dirs(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng,
                           const std::vector<double>* aoa = nullptr);

/// Draws G, H_I then H_d from one stream, in that order.
ChannelRealization draw_realization(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng,
                                    const std::vector<double>* aoa = nullptr);

/// H_D = G^H diag(phi) H_I. Throws ContractViolation on a length mismatch.
CMatrix compose_dirs_channel(const ChannelRealization& real, const PhaseVector& phases);
CMatrix compose_dirs_channel(const CMatrix& g, const CMatrix& h_i, const CVector& coeffs);

/// Throws CapabilityError when the scene has no active jammer.
AjChannel draw_aj(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng);

/// Long-format CSV dump: header "row,col,re,im", one line per entry, %.17g.
void write_matrix_csv(std::ostream& out, const CMatrix& m);
CMatrix read_matrix_csv(std::istream& in);

}  // namespace dirs
