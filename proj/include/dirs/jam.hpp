// SPDX-License-Identifier: Apache-2.0
//
// DIRS phase vectors (random / quantized) and the active-jammer interference term.

#pragma once

#include "dirs/common.hpp"
#include "dirs/random.hpp"
#include "dirs/scene.hpp"

#include <vector>

namespace dirs {

struct PhaseVector {
    std::vector<double> phases;  ///< radians, in [0, 2pi)
    CVector coeffs;              ///< exp(j * phases)

    std::size_t size() const noexcept { return phases.size(); }
    static PhaseVector from_phases(std::vector<double> phases);
    /// Builds from arbitrary nonzero complex coefficients; stores the normalized
    /// coefficients and their angles wrapped to [0, 2pi).
    static PhaseVector from_coeffs(const CVector& coeffs);
};

/// i.i.d. phases: uniform over [0, 2pi * support) when continuous, otherwise
/// uniform over the grid points {2pi m / 2^b} lying in that arc.
PhaseVector random_phases(std::size_t n, PhaseResolution resolution, RandomStream& rng,
                          PhaseDistribution distribution = {});

/// Nearest b-bit grid point per element (angular distance, wraps at 2pi);
/// ties go to the smaller grid angle.
PhaseVector quantize_phases(const PhaseVector& continuous, int bits);

/// p_J |w_k^H h_J|^2.
double aj_interference_power(const CVector& w_k, const CVector& h_j, double p_j_watts);

}  // namespace dirs
