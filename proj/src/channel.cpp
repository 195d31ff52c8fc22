// SPDX-License-Identifier: Apache-2.0

#include "dirs/channel.hpp"

#include "dirs/jam.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

namespace dirs {

namespace {

CMatrix scaled_rayleigh(Eigen::Index rows, const std::vector<double>& gains, RandomStream& rng) {
    CMatrix h = complex_normal_matrix(rows, static_cast<Eigen::Index>(gains.size()), rng);
    for (Eigen::Index k = 0; k < h.cols(); ++k) h.col(k) *= std::sqrt(gains[static_cast<std::size_t>(k)]);
    return h;
}

}  // namespace

CMatrix draw_direct(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng) {
    if (gains.l_d.size() != static_cast<std::size_t>(cfg.n_users))
        throw ContractViolation("draw_direct: gains.l_d has wrong length");
    return scaled_rayleigh(cfg.n_antennas, gains.l_d, rng);
}

CMatrix draw_dirs_lu(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng) {
    if (gains.l_i.size() != static_cast<std::size_t>(cfg.n_users))
        throw ContractViolation("draw_dirs_lu: gains.l_i has wrong length");
    return scaled_rayleigh(cfg.n_dirs_elements, gains.l_i, rng);
}

std::vector<double> draw_aoa(const SceneConfig& cfg, RandomStream& rng) {
    std::vector<double> aoa(static_cast<std::size_t>(cfg.n_dirs_elements));
    for (double& t : aoa) t = cfg.theta_a * (2.0 * uniform01(rng) - 1.0);
    return aoa;
}

CMatrix los_matrix(const std::vector<double>& aoa, int n_antennas, double spacing_over_wavelength) {
    CMatrix los(static_cast<Eigen::Index>(aoa.size()), n_antennas);
    for (Eigen::Index r = 0; r < los.rows(); ++r) {
        const double step = 2.0 * std::numbers::pi * spacing_over_wavelength * std::sin(aoa[static_cast<std::size_t>(r)]);
        for (Eigen::Index n = 0; n < n_antennas; ++n) los(r, n) = std::polar(1.0, step * static_cast<double>(n));
    }
    return los;
}

BsDirsChannel draw_bs_dirs(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng,
                           const std::vector<double>* aoa) {
    BsDirsChannel out;
    out.aoa = aoa ? *aoa : draw_aoa(cfg, rng);
    if (out.aoa.size() != static_cast<std::size_t>(cfg.n_dirs_elements))
        throw ContractViolation("draw_bs_dirs: aoa length differs from n_dirs_elements");
    out.g = complex_normal_matrix(cfg.n_dirs_elements, cfg.n_antennas, rng);  // G^NLOS
    const double scale = std::sqrt(gains.l_g);
    // Column n of G^LOS is z^n elementwise with z_r = exp(j 2pi (d/lambda) sin theta_r).
    CVector z(cfg.n_dirs_elements);
    for (int r = 0; r < cfg.n_dirs_elements; ++r)
        z(r) = std::polar(1.0, 2.0 * std::numbers::pi * cfg.element_spacing_over_wavelength *
                                   std::sin(out.aoa[static_cast<std::size_t>(r)]));
    CVector los = CVector::Ones(cfg.n_dirs_elements);
    for (int n = 0; n < cfg.n_antennas; ++n) {
        const double eps = cfg.rician_factor(n);
        const double w_los = scale * std::sqrt(eps / (eps + 1.0));
        const double w_nlos = scale * std::sqrt(1.0 / (eps + 1.0));
        out.g.col(n) = w_los * los + w_nlos * out.g.col(n);
        los = los.cwiseProduct(z);
    }
    return out;
}

ChannelRealization draw_realization(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng,
                                    const std::vector<double>* aoa) {
    ChannelRealization real;
    auto bd = draw_bs_dirs(cfg, gains, rng, aoa);
    real.g = std::move(bd.g);
    real.aoa = std::move(bd.aoa);
    real.h_i = draw_dirs_lu(cfg, gains, rng);
    real.h_d = draw_direct(cfg, gains, rng);
    real.gains = gains;
    return real;
}

CMatrix compose_dirs_channel(const CMatrix& g, const CMatrix& h_i, const CVector& coeffs) {
    if (g.rows() != coeffs.size() || h_i.rows() != coeffs.size())
        throw ContractViolation("compose_dirs_channel: phase vector length " + std::to_string(coeffs.size()) +
                                " does not match N_D = " + std::to_string(g.rows()));
    if (coeffs.size() == 0) return CMatrix::Zero(g.cols(), h_i.cols());
    const CMatrix reflected = coeffs.asDiagonal() * h_i;
    return g.adjoint() * reflected;
}

CMatrix compose_dirs_channel(const ChannelRealization& real, const PhaseVector& phases) {
    return compose_dirs_channel(real.g, real.h_i, phases.coeffs);
}

AjChannel draw_aj(const SceneConfig& cfg, const LargeScaleGains& gains, RandomStream& rng) {
    if (!cfg.aj_position || !gains.l_j) throw CapabilityError("active jammer requested but aj_position is not configured");
    AjChannel aj;
    aj.h_j = complex_normal_matrix(cfg.n_antennas, 1, rng).col(0) * std::sqrt(*gains.l_j);
    return aj;
}

void write_matrix_csv(std::ostream& out, const CMatrix& m) {
    out << "row,col,re,im\n";
    char buf[96];
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::snprintf(buf, sizeof buf, "%td,%td,%.17g,%.17g\n", r, c, m(r, c).real(), m(r, c).imag());
            out << buf;
        }
}

CMatrix read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "row,col,re,im") throw ConfigError("matrix csv: missing header");
    std::vector<std::tuple<Eigen::Index, Eigen::Index, cd>> entries;
    Eigen::Index rows = 0, cols = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long long r = 0, c = 0;
        double re = 0, im = 0;
        if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf", &r, &c, &re, &im) != 4 || r < 0 || c < 0)
            throw ConfigError("matrix csv: bad line '" + line + "'");
        entries.emplace_back(r, c, cd{re, im});
        rows = std::max<Eigen::Index>(rows, r + 1);
        cols = std::max<Eigen::Index>(cols, c + 1);
    }
    CMatrix m = CMatrix::Zero(rows, cols);
    for (const auto& [r, c, v] : entries) m(r, c) = v;
    return m;
}

}  // namespace dirs
