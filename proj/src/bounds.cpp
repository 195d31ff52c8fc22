// SPDX-License-Identifier: Apache-2.0

#include "dirs/bounds.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dirs {

namespace {

void check_common(const BoundInput& in, const char* who) {
    if (in.n_users < 1 || in.gains.l_d.size() != static_cast<std::size_t>(in.n_users) ||
        in.gains.l_i.size() != static_cast<std::size_t>(in.n_users))
        throw DomainError(std::string(who) + ": gains do not match n_users");
    if (in.target_user < 0 || in.target_user >= in.n_users)
        throw DomainError(std::string(who) + ": target_user out of range");
    if (in.n_dirs_elements < 0) throw DomainError(std::string(who) + ": negative n_dirs_elements");
}

}  // namespace

double aca_interference_expect(const LargeScaleGains& gains, int n_dirs_elements, double p_d_watts) {
    return p_d_watts * static_cast<double>(n_dirs_elements) * gains.cascade_sum();
}

double lower_bound_mrc(const BoundInput& in) {
    check_common(in, "lower_bound_mrc");
    if (in.n_antennas < 3) throw DomainError("lower_bound_mrc: needs N_t >= 3");
    const auto k = static_cast<std::size_t>(in.target_user);
    const double co_users = std::accumulate(in.gains.l_d.begin(), in.gains.l_d.end(), 0.0) - in.gains.l_d[k];
    const double num = in.p_d_watts * (in.n_antennas - 1) * in.gains.l_d[k];
    const double den = in.p_d_watts * co_users + aca_interference_expect(in.gains, in.n_dirs_elements, in.p_d_watts) +
                       in.noise_watts;
    return std::log2(1.0 + num / den);
}

double lower_bound_zf(const BoundInput& in) {
    check_common(in, "lower_bound_zf");
    if (in.n_antennas <= in.n_users) throw DomainError("lower_bound_zf: needs N_t > K");
    const auto k = static_cast<std::size_t>(in.target_user);
    const double num = in.p_d_watts * (in.n_antennas - in.n_users) * in.gains.l_d[k];
    const double den = aca_interference_expect(in.gains, in.n_dirs_elements, in.p_d_watts) + in.noise_watts;
    return std::log2(1.0 + num / den);
}

double zf_interference_limited_rate(const BoundInput& in) {
    check_common(in, "zf_interference_limited_rate");
    if (in.n_antennas <= in.n_users) throw DomainError("zf_interference_limited_rate: needs N_t > K");
    if (in.n_dirs_elements == 0) throw DomainError("zf_interference_limited_rate: unbounded without a DIRS");
    const auto k = static_cast<std::size_t>(in.target_user);
    return std::log2(1.0 + (in.n_antennas - in.n_users) * in.gains.l_d[k] /
                               (in.n_dirs_elements * in.gains.cascade_sum()));
}

double wishart_trace_expect(int m, int n) {
    if (m < 1 || n <= m) throw DomainError("wishart_trace_expect: needs n > m >= 1");
    return static_cast<double>(m) / static_cast<double>(n - m);
}

double jensen_bound_from_samples(std::span<const double> inverse_sinr) {
    if (inverse_sinr.empty()) throw DomainError("jensen_bound_from_samples: no samples");
    const double mean = std::accumulate(inverse_sinr.begin(), inverse_sinr.end(), 0.0) /
                        static_cast<double>(inverse_sinr.size());
    return std::log2(1.0 + 1.0 / mean);
}

}  // namespace dirs
