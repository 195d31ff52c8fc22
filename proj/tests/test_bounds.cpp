// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dirs/bounds.hpp"
#include "dirs/channel.hpp"
#include "dirs/detect.hpp"
#include "dirs/jam.hpp"
#include "dirs/rate.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

using namespace dirs;

namespace {

LargeScaleGains gains_of(std::vector<double> l_d, std::vector<double> l_i, double l_g) {
    LargeScaleGains g;
    g.l_d = std::move(l_d);
    g.l_i = std::move(l_i);
    g.l_g = l_g;
    return g;
}

SceneConfig scene(int n_t, int n_d, int k) {
    SceneConfig cfg;
    cfg.n_antennas = n_t;
    cfg.n_dirs_elements = n_d;
    cfg.n_users = k;
    return cfg;
}

LargeScaleGains placed(const SceneConfig& cfg) {
    auto rng = make_stream(cfg.seed, StreamTag::Placement);
    return large_scale(cfg, place_users(cfg, rng));
}

BoundInput input(const SceneConfig& cfg, const LargeScaleGains& g, double p_dbm, int k) {
    return BoundInput{cfg.n_antennas, cfg.n_users, cfg.n_dirs_elements, dbm_to_watts(p_dbm), noise_watts(cfg), g, k};
}

}  // namespace

TEST_CASE("lower_bound_mrc: closed forms") {
    auto g1 = gains_of({2e-3}, {1e-4}, 5e-5);
    BoundInput in{16, 1, 0, 0.5, 1e-3, g1, 0};
    CHECK(lower_bound_mrc(in) == doctest::Approx(std::log2(1.0 + 0.5 * 15 * 2e-3 / 1e-3)).epsilon(1e-14));

    auto g = gains_of({1e-11, 3e-12, 5e-12}, {2e-11, 1e-11, 4e-11}, 6e-5);
    BoundInput big{64, 3, 512, 1e6, 1e-15, g, 1};
    const double limit = std::log2(1.0 + 63 * 3e-12 / ((1e-11 + 5e-12) + 512 * 6e-5 * 7e-11));
    CHECK(lower_bound_mrc(big) == doctest::Approx(limit).epsilon(1e-6));

    big.n_antennas = 2;
    CHECK_THROWS_AS(lower_bound_mrc(big), DomainError);
    big.n_antennas = 64;
    big.target_user = 3;
    CHECK_THROWS_AS(lower_bound_mrc(big), DomainError);
}

TEST_CASE("lower_bound_zf: closed forms") {
    auto g = gains_of({1e-11, 3e-12}, {2e-11, 1e-11}, 6e-5);
    BoundInput in{32, 2, 0, 1e-3, 1e-15, g, 0};
    CHECK(lower_bound_zf(in) == doctest::Approx(std::log2(1.0 + 1e-3 * 30 * 1e-11 / 1e-15)).epsilon(1e-14));

    // doubling N_D halves the SINR argument once noise is negligible
    in.p_d_watts = 10.0;
    in.n_dirs_elements = 1024;
    const double s1 = std::exp2(lower_bound_zf(in)) - 1.0;
    in.n_dirs_elements = 2048;
    const double s2 = std::exp2(lower_bound_zf(in)) - 1.0;
    CHECK(s2 / s1 == doctest::Approx(0.5).epsilon(0.01));

    in.n_antennas = 2;
    CHECK_THROWS_AS(lower_bound_zf(in), DomainError);
}

TEST_CASE("bounds decrease in N_D and increase in N_t") {
    auto cfg = scene(256, 4096, 8);
    auto g = placed(cfg);
    for (int k = 0; k < 8; ++k) {
        double prev_mrc = 1e9, prev_zf = 1e9;
        for (int n_d : {0, 256, 1024, 4096, 16384}) {
            BoundInput in{256, 8, n_d, 1e-3, noise_watts(cfg), g, k};
            CHECK(lower_bound_mrc(in) < prev_mrc);
            CHECK(lower_bound_zf(in) < prev_zf);
            prev_mrc = lower_bound_mrc(in);
            prev_zf = lower_bound_zf(in);
        }
        prev_mrc = prev_zf = -1.0;
        for (int n_t : {16, 64, 256, 1024}) {
            BoundInput in{n_t, 8, 4096, 1e-3, noise_watts(cfg), g, k};
            CHECK(lower_bound_mrc(in) > prev_mrc);
            CHECK(lower_bound_zf(in) > prev_zf);
            prev_mrc = lower_bound_mrc(in);
            prev_zf = lower_bound_zf(in);
        }
    }
}

TEST_CASE("ZF bound forgets p_d in the interference-limited regime") {
    auto cfg = scene(256, 4096, 8);
    auto g = placed(cfg);
    const double s2 = noise_watts(cfg);
    for (double p_dbm : {30.0, 40.0}) {
        for (int k = 0; k < 8; ++k) {
            auto lo = input(cfg, g, p_dbm, k);
            auto hi = lo;
            hi.p_d_watts *= 100.0;
            const double ratio = aca_interference_expect(g, 4096, lo.p_d_watts) / s2;
            REQUIRE(ratio >= 1e3);
            const double diff = std::abs(lower_bound_zf(hi) - lower_bound_zf(lo));
            CHECK(diff < 1e-3);
            CHECK(diff <= std::numbers::log2e / ratio);
            CHECK(lower_bound_zf(hi) < zf_interference_limited_rate(lo));
            CHECK(lower_bound_zf(hi) == doctest::Approx(zf_interference_limited_rate(lo)).epsilon(1e-4));
        }
    }
    auto none = input(scene(256, 0, 8), g, 0.0, 0);
    CHECK_THROWS_AS(zf_interference_limited_rate(none), DomainError);
}

TEST_CASE("wishart_trace_expect") {
    CHECK(wishart_trace_expect(8, 16) == 1.0);
    CHECK(wishart_trace_expect(1, 64) == doctest::Approx(1.0 / 63.0));
    CHECK_THROWS_AS(wishart_trace_expect(8, 8), DomainError);
    CHECK_THROWS_AS(wishart_trace_expect(0, 3), DomainError);

    auto rng = make_stream(1, StreamTag::Test);
    double acc = 0.0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        CMatrix h = complex_normal_matrix(16, 8, rng);
        acc += (h.adjoint() * h).inverse().trace().real();
    }
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("aca_interference_expect") {
    auto g = gains_of({1.0}, {1.0}, 1.0);
    CHECK(aca_interference_expect(g, 0, 1.0) == 0.0);
    CHECK(aca_interference_expect(g, 4, 1.0) == 4.0);
    auto g2 = gains_of({1.0, 1.0}, {2.0, 3.0}, 0.5);
    CHECK(aca_interference_expect(g2, 10, 0.1) == doctest::Approx(2.5));
}

TEST_CASE("aca_interference_expect matches the projected cascade power") {
    // Default geometry; smaller arrays keep the draw count affordable.
    auto cfg = scene(64, 1024, 8);
    auto g = placed(cfg);
    const double p = dbm_to_watts(0.0);
    auto rng = make_stream(2, StreamTag::Test);
    const int draws = 1500;
    double acc = 0.0;
    for (int t = 0; t < draws; ++t) {
        auto real = draw_realization(cfg, g, rng);
        auto phi = random_phases(1024, cfg.phase_resolution, rng);
        CMatrix h_dirs = compose_dirs_channel(real, phi);
        for (int k = 0; k < 8; ++k) {
            const CVector u = real.h_d.col(k).normalized();
            acc += p * (u.adjoint() * h_dirs).squaredNorm();
        }
    }
    CHECK(acc / (draws * 8.0) == doctest::Approx(aca_interference_expect(g, 1024, p)).epsilon(0.03));
}

TEST_CASE("jensen_bound_from_samples") {
    const std::vector<double> inv{0.5, 1.5};
    CHECK(jensen_bound_from_samples(inv) == doctest::Approx(1.0));
    CHECK_THROWS_AS(jensen_bound_from_samples(std::span<const double>{}), DomainError);

    // Unjammed ZF: E[1/SINR] = s2 E||w||^2 / p, so the implicit bound meets the closed form.
    auto cfg = scene(32, 0, 4);
    auto g = placed(cfg);
    const double p = dbm_to_watts(-10.0), s2 = noise_watts(cfg);
    auto rng = make_stream(3, StreamTag::Test);
    std::vector<double> inv_sinr;
    double mean_rate = 0.0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) {
        auto det = zf(draw_direct(cfg, g, rng));
        const double sinr = sinr_zf_dirs(det, CMatrix(), 0, p, s2);
        inv_sinr.push_back(1.0 / sinr);
        mean_rate += rate_from_sinr(sinr) / draws;
    }
    const double implicit = jensen_bound_from_samples(inv_sinr);
    CHECK(implicit <= mean_rate);
    CHECK(implicit == doctest::Approx(lower_bound_zf(input(cfg, g, -10.0, 0))).epsilon(0.01));
}
