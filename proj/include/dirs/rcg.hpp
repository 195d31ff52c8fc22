// SPDX-License-Identifier: Apache-2.0
//
// CSI-aware passive-jammer baseline: minimize the uplink sum rate over
// unit-modulus reflection coefficients with Riemannian conjugate gradient
// on the complex circle manifold, then project onto a b-bit phase grid.

#pragma once

#include "dirs/channel.hpp"
#include "dirs/common.hpp"
#include "dirs/detect.hpp"
#include "dirs/jam.hpp"
#include "dirs/scene.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace dirs {

/// Precomputed pieces of the PJ sum-rate objective for one realization.
///
/// With V = G W and A = W^H H_d, the effective detector outputs are
/// E(phi) = A + V^H diag(phi) H_I, so objective and gradient cost O(N_D K^2).
class PjObjective {
public:
    PjObjective(const ChannelRealization& real, const DetectorMatrix& det, double p_d_watts, double noise_watts);

    Eigen::Index size() const noexcept { return h_i_.rows(); }

    /// K x K matrix with entries w_k^H (h_d,i + h_D,i).
    CMatrix outputs(const CVector& phi) const;
    double value(const CVector& phi) const;
    /// Per-user rates log2(1 + SINR_k) at phi.
    std::vector<double> user_rates(const CVector& phi) const;
    /// Euclidean gradient as a complex vector: d f / d Re(phi) + j d f / d Im(phi),
    /// i.e. twice the Wirtinger derivative with respect to conj(phi).
    CVector euclidean_gradient(const CVector& phi) const;

private:
    CMatrix a_;    // W^H H_d
    CMatrix v_;    // G W
    CMatrix h_i_;  // H_I
    RVector noise_;  // s2 ||w_k||^2
    double p_d_;
};

/// Sum over k of log2(1 + p |w_k^H(h_d,k + h_D,k)|^2 / (p sum_{i!=k} |w_k^H(h_d,i + h_D,i)|^2 + s2 ||w_k||^2)).
double pj_objective(const CVector& phi, const ChannelRealization& real, const DetectorMatrix& det,
                    double p_d_watts, double noise_watts);

/// grad = egrad - Re{egrad .* conj(phi)} .* phi.
CVector riemannian_gradient(const CVector& phi, const CVector& euclid_grad);

/// D = -grad + beta * (prev - Re{prev .* conj(phi)} .* phi).
CVector search_direction(const CVector& riem_grad, const CVector& prev_dir, const CVector& phi, double cg_beta);

/// Elementwise (phi + step D) / |phi + step D|. Throws DomainError if step < 0
/// or a magnitude falls below 1e-15.
CVector retract(const CVector& phi, const CVector& dir, double step);

/// max_r |Re{v_r conj(phi_r)}|.
double tangency_residual(const CVector& phi, const CVector& v);

struct RcgOptions {
    double p_d_watts = 1e-3;
    double noise_watts = 1e-15;
    /// Projection grid for the quantized output; continuous skips it.
    PhaseResolution resolution = PhaseResolution::continuous();
    double tolerance = 1e-6;
    int max_iterations = 500;
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_decrease = 1e-4;
    int max_backtracks = 60;
    /// Starting point; when absent, uniform continuous phases from `seed`.
    std::optional<CVector> initial;
    std::uint64_t seed = 1;
    bool record_trace = true;
};

struct RcgTraceRow {
    int iteration = 0;
    double objective = 0.0;
    double step = 0.0;
    double grad_norm = 0.0;
    double cg_beta = 0.0;
    double tangency = 0.0;        ///< tangency residual of the Riemannian gradient
    double modulus_error = 0.0;   ///< max_r ||phi_r| - 1|
};

struct RcgResult {
    PhaseVector continuous;
    PhaseVector quantized;
    double objective_continuous = 0.0;
    double objective_quantized = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<RcgTraceRow> trace;
};

RcgResult optimize(const ChannelRealization& real, const DetectorMatrix& det, const RcgOptions& opt);

/// CSV with header "iteration,objective,step,grad_norm".
void write_trace_csv(std::ostream& out, const std::vector<RcgTraceRow>& trace);

}  // namespace dirs
