// SPDX-License-Identifier: Apache-2.0

#include "dirs/jam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dirs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a >= kTwoPi ? 0.0 : a;
}

}  // namespace

PhaseVector PhaseVector::from_phases(std::vector<double> phases) {
    PhaseVector v;
    v.coeffs.resize(static_cast<Eigen::Index>(phases.size()));
    for (std::size_t r = 0; r < phases.size(); ++r) {
        phases[r] = wrap_angle(phases[r]);
        v.coeffs(static_cast<Eigen::Index>(r)) = std::polar(1.0, phases[r]);
    }
    v.phases = std::move(phases);
    return v;
}

PhaseVector PhaseVector::from_coeffs(const CVector& coeffs) {
    PhaseVector v;
    v.coeffs.resize(coeffs.size());
    v.phases.resize(static_cast<std::size_t>(coeffs.size()));
    for (Eigen::Index r = 0; r < coeffs.size(); ++r) {
        const double mag = std::abs(coeffs(r));
        if (!(mag > 0.0)) throw DomainError("PhaseVector::from_coeffs: zero coefficient");
        v.coeffs(r) = coeffs(r) / mag;
        v.phases[static_cast<std::size_t>(r)] = wrap_angle(std::arg(coeffs(r)));
    }
    return v;
}

PhaseVector random_phases(std::size_t n, PhaseResolution resolution, RandomStream& rng,
                          PhaseDistribution distribution) {
    std::vector<double> phases(n);
    if (resolution.is_continuous()) {
        const double span = kTwoPi * distribution.support;
        for (double& p : phases) p = span * uniform01(rng);
    } else {
        const std::uint64_t levels = resolution.levels();
        // Grid points m with 2pi m / levels < 2pi * support; at least one.
        auto usable = static_cast<std::uint64_t>(std::ceil(distribution.support * static_cast<double>(levels)));
        usable = std::clamp<std::uint64_t>(usable, 1, levels);
        std::uniform_int_distribution<std::uint64_t> pick(0, usable - 1);
        for (double& p : phases) p = kTwoPi * static_cast<double>(pick(rng)) / static_cast<double>(levels);
    }
    return PhaseVector::from_phases(std::move(phases));
}

PhaseVector quantize_phases(const PhaseVector& continuous, int bits) {
    const auto res = PhaseResolution::with_bits(bits);
    const double levels = static_cast<double>(res.levels());
    const double bin = kTwoPi / levels;
    std::vector<double> out(continuous.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double a = wrap_angle(continuous.phases[r]);
        const double pos = a / bin;
        const double lo = std::floor(pos);
        const double frac = pos - lo;
        // frac == 0.5 is a tie: keep the smaller grid angle. Between the last
        // grid point and 2pi the smaller one is the point at 0.
        double m = frac > 0.5 ? lo + 1.0 : lo;
        if (frac == 0.5 && lo + 1.0 >= levels) m = 0.0;
        if (m >= levels) m = 0.0;
        out[r] = m * bin;
    }
    return PhaseVector::from_phases(std::move(out));
}

double aj_interference_power(const CVector& w_k, const CVector& h_j, double p_j_watts) {
    if (w_k.size() != h_j.size()) throw ContractViolation("aj_interference_power: length mismatch");
    return p_j_watts * std::norm(w_k.dot(h_j));  // Eigen's dot conjugates the first argument
}

}  // namespace dirs
