// SPDX-License-Identifier: Apache-2.0

#include "dirs/random.hpp"

#include <cmath>
#include <numbers>

namespace dirs {

RandomStream make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t trial,
                         std::uint32_t attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(trial),
                      static_cast<std::uint32_t>(trial >> 32), attempt};
    return RandomStream(seq);
}

double uniform01(RandomStream& rng) {
    // 53 random mantissa bits.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

cd complex_normal(RandomStream& rng) {
    // |z|^2 ~ Exp(1) and arg z ~ U[0, 2pi) gives exactly CN(0, 1).
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double r = std::sqrt(-std::log(u));
    const double t = 2.0 * std::numbers::pi * uniform01(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng) {
    CMatrix m(rows, cols);
    cd* p = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = complex_normal(rng);
    return m;
}

}  // namespace dirs
