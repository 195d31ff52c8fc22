// SPDX-License-Identifier: Apache-2.0
//
// Linear detectors designed on the direct channel H_d only. The BS never
// sees the DIRS-jammed part of the channel.

#pragma once

#include "dirs/common.hpp"

#include <string_view>

namespace dirs {

enum class DetectorKind { MRC, ZF };

std::string_view to_string(DetectorKind kind);

struct DetectorMatrix {
    CMatrix w;  ///< N_t x K, column k is w_k
    DetectorKind kind = DetectorKind::MRC;
};

/// Condition number of H_d above which zf() refuses to build a detector.
inline constexpr double kZfConditionLimit = 1e10;

/// W = H_d.
DetectorMatrix mrc(const CMatrix& h_d);

/// W^H = (H_d^H H_d)^{-1} H_d^H, computed from a thin Householder QR of H_d.
/// Throws SingularityError when cond(H_d) > kZfConditionLimit or N_t < K.
DetectorMatrix zf(const CMatrix& h_d);

DetectorMatrix build_detector(DetectorKind kind, const CMatrix& h_d);

/// max_ij |(W^H H_d - I)_ij|.
double zf_residual(const DetectorMatrix& det, const CMatrix& h_d);

}  // namespace dirs
