// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dirs/common.hpp"

#include <cstdint>
#include <random>

namespace dirs {

using RandomStream = std::mt19937_64;

/// Independent sub-streams of one experiment seed. Each trial draws its
/// channels, phases and AJ channel from separately keyed streams so that
/// changing one scenario's randomness never shifts another's.
enum class StreamTag : std::uint32_t {
    Placement = 1,
    Direct = 2,   ///< H_d
    Cascade = 3,  ///< G and H_I
    Phases = 4,
    Aj = 5,
    RcgInit = 6,
    Aoa = 7,      ///< frozen per-scene AoAs
    Test = 8,
};

/// Deterministic stream for (seed, tag, trial, attempt). Any worker that
/// asks for the same key gets the same sequence.
RandomStream make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t trial = 0,
                         std::uint32_t attempt = 0);

/// Uniform on [0, 1).
double uniform01(RandomStream& rng);

/// Circularly-symmetric CN(0, 1): variance 1/2 per real component.
cd complex_normal(RandomStream& rng);

/// rows x cols matrix of i.i.d. CN(0, 1) entries, filled column-major.
CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng);

}  // namespace dirs
