// SPDX-License-Identifier: Apache-2.0

#include "dirs/rcg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace dirs {

PjObjective::PjObjective(const ChannelRealization& real, const DetectorMatrix& det, double p_d_watts,
                         double noise_watts)
    : a_(det.w.adjoint() * real.h_d), h_i_(real.h_i), p_d_(p_d_watts) {
    if (det.w.rows() != real.h_d.rows() || det.w.cols() != real.h_d.cols())
        throw ContractViolation("PjObjective: detector shape differs from H_d");
    if (real.g.rows() == 0)
        v_ = CMatrix::Zero(0, det.w.cols());
    else
        v_ = real.g * det.w;
    noise_ = noise_watts * det.w.colwise().squaredNorm().transpose();
}

CMatrix PjObjective::outputs(const CVector& phi) const {
    if (phi.size() != h_i_.rows()) throw ContractViolation("PjObjective: phase vector length mismatch");
    if (phi.size() == 0) return a_;
    return a_ + v_.adjoint() * (phi.asDiagonal() * h_i_);
}

std::vector<double> PjObjective::user_rates(const CVector& phi) const {
    const CMatrix e = outputs(phi);
    std::vector<double> rates(static_cast<std::size_t>(e.rows()));
    for (Eigen::Index k = 0; k < e.rows(); ++k) {
        const double total = p_d_ * e.row(k).squaredNorm() + noise_(k);
        const double signal = p_d_ * std::norm(e(k, k));
        rates[static_cast<std::size_t>(k)] = std::log2(total / (total - signal));
    }
    return rates;
}

double PjObjective::value(const CVector& phi) const {
    double f = 0.0;
    for (double r : user_rates(phi)) f += r;
    return f;
}

CVector PjObjective::euclidean_gradient(const CVector& phi) const {
    const CMatrix e = outputs(phi);
    const Eigen::Index k_users = e.rows();
    // M_ki = (1/T_k - [i != k]/D_k) E_ki, T_k the total and D_k the interference-plus-noise power.
    CMatrix m(k_users, k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
        const double total = p_d_ * e.row(k).squaredNorm() + noise_(k);
        const double interference = total - p_d_ * std::norm(e(k, k));
        for (Eigen::Index i = 0; i < k_users; ++i)
            m(k, i) = e(k, i) * (1.0 / total - (i == k ? 0.0 : 1.0 / interference));
    }
    // grad_r = (2 p / ln 2) sum_k V_rk (conj(H_I) M^T)_rk
    const CMatrix hm = h_i_.conjugate() * m.transpose();
    return (2.0 * p_d_ / std::numbers::ln2) * v_.cwiseProduct(hm).rowwise().sum();
}

double pj_objective(const CVector& phi, const ChannelRealization& real, const DetectorMatrix& det,
                    double p_d_watts, double noise_watts) {
    return PjObjective(real, det, p_d_watts, noise_watts).value(phi);
}

namespace {

/// x - Re{x .* conj(phi)} .* phi
CVector project_tangent(const CVector& phi, const CVector& x) {
    if (phi.size() != x.size()) throw ContractViolation("tangent projection: length mismatch");
    const RVector radial = x.cwiseProduct(phi.conjugate()).real();
    return x - phi.cwiseProduct(radial.cast<cd>());
}

double inner(const CVector& a, const CVector& b) { return a.dot(b).real(); }

double modulus_error(const CVector& phi) {
    return phi.size() == 0 ? 0.0 : (phi.cwiseAbs().array() - 1.0).abs().maxCoeff();
}

}  // namespace

CVector riemannian_gradient(const CVector& phi, const CVector& euclid_grad) {
    return project_tangent(phi, euclid_grad);
}

CVector search_direction(const CVector& riem_grad, const CVector& prev_dir, const CVector& phi, double cg_beta) {
    if (cg_beta == 0.0) return -riem_grad;
    return -riem_grad + cg_beta * project_tangent(phi, prev_dir);
}

CVector retract(const CVector& phi, const CVector& dir, double step) {
    if (step < 0.0) throw DomainError("retract: step must be non-negative");
    if (phi.size() != dir.size()) throw ContractViolation("retract: length mismatch");
    CVector out = phi + step * dir;
    for (Eigen::Index r = 0; r < out.size(); ++r) {
        const double mag = std::abs(out(r));
        if (mag < 1e-15) throw DomainError("retract: degenerate element " + std::to_string(r));
        out(r) /= mag;
    }
    return out;
}

double tangency_residual(const CVector& phi, const CVector& v) {
    if (phi.size() == 0) return 0.0;
    return v.cwiseProduct(phi.conjugate()).real().cwiseAbs().maxCoeff();
}

RcgResult optimize(const ChannelRealization& real, const DetectorMatrix& det, const RcgOptions& opt) {
    const PjObjective obj(real, det, opt.p_d_watts, opt.noise_watts);
    const Eigen::Index n = obj.size();

    CVector phi;
    if (opt.initial) {
        if (opt.initial->size() != n) throw ContractViolation("optimize: initial phase vector length mismatch");
        phi = PhaseVector::from_coeffs(*opt.initial).coeffs;
    } else {
        auto rng = make_stream(opt.seed, StreamTag::RcgInit);
        phi = random_phases(static_cast<std::size_t>(n), PhaseResolution::continuous(), rng).coeffs;
    }

    RcgResult res;
    double f = obj.value(phi);
    res.initial_objective = f;
    auto dump = [&](int it, double value) {
        std::ostringstream msg;
        msg << "optimize: non-finite objective " << value << " at iteration " << it << " (last finite objective "
            << f << ", N_D = " << n << ")";
        return NumericalError(msg.str());
    };
    if (!std::isfinite(f)) throw dump(0, f);

    if (n > 0) {
        CVector grad = riemannian_gradient(phi, obj.euclidean_gradient(phi));
        CVector dir = -grad;
        double beta = 0.0;
        if (opt.record_trace)
            res.trace.push_back({0, f, 0.0, grad.norm(), 0.0, tangency_residual(phi, grad), modulus_error(phi)});

        for (int it = 1; it <= opt.max_iterations; ++it) {
            const double gnorm2 = grad.squaredNorm();
            if (gnorm2 == 0.0) {
                res.converged = true;
                break;
            }
            double slope = inner(grad, dir);
            if (!(slope < 0.0)) {  // not a descent direction: restart
                dir = -grad;
                slope = -gnorm2;
            }

            double step = opt.initial_step;
            CVector trial;
            double f_trial = f;
            bool accepted = false;
            for (int bt = 0; bt <= opt.max_backtracks; ++bt, step *= opt.shrink) {
                trial = retract(phi, dir, step);
                f_trial = obj.value(trial);
                if (!std::isfinite(f_trial)) throw dump(it, f_trial);
                if (f_trial <= f + opt.sufficient_decrease * step * slope) {
                    accepted = true;
                    break;
                }
            }
            res.iterations = it;
            if (!accepted) {  // no descent left at machine precision
                res.converged = true;
                break;
            }

            const double f_prev = f;
            phi = std::move(trial);
            f = f_trial;
            CVector grad_new = riemannian_gradient(phi, obj.euclidean_gradient(phi));
            // Polak-Ribiere with the previous gradient transported by projection, clamped at 0.
            beta = std::max(0.0, inner(grad_new, grad_new - project_tangent(phi, grad)) / gnorm2);
            dir = search_direction(grad_new, dir, phi, beta);
            grad = std::move(grad_new);

            if (opt.record_trace)
                res.trace.push_back({it, f, step, grad.norm(), beta, tangency_residual(phi, grad), modulus_error(phi)});
            if (std::abs(f_prev - f) < opt.tolerance) {
                res.converged = true;
                break;
            }
        }
    } else {
        res.converged = true;
        if (opt.record_trace) res.trace.push_back({0, f, 0.0, 0.0, 0.0, 0.0, 0.0});
    }

    res.continuous = PhaseVector::from_coeffs(phi);
    res.objective_continuous = f;
    if (opt.resolution.is_continuous()) {
        res.quantized = res.continuous;
        res.objective_quantized = f;
    } else {
        res.quantized = quantize_phases(res.continuous, opt.resolution.bits());
        res.objective_quantized = obj.value(res.quantized.coeffs);
    }
    return res;
}

void write_trace_csv(std::ostream& out, const std::vector<RcgTraceRow>& trace) {
    out << "iteration,objective,step,grad_norm\n";
    char buf[128];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.6g,%.6g\n", row.iteration, row.objective, row.step, row.grad_norm);
        out << buf;
    }
}

}  // namespace dirs
