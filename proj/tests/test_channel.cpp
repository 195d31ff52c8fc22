// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dirs/channel.hpp"
#include "dirs/jam.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace dirs;

namespace {

SceneConfig small_scene(int n_t, int n_d, int k) {
    SceneConfig cfg;
    cfg.n_antennas = n_t;
    cfg.n_dirs_elements = n_d;
    cfg.n_users = k;
    return cfg;
}

LargeScaleGains default_gains(const SceneConfig& cfg) {
    auto rng = make_stream(cfg.seed, StreamTag::Placement);
    return large_scale(cfg, place_users(cfg, rng));
}

// mean of |x|^2 and its standard error
struct Moment {
    double mean;
    double se;
};

Moment second_moment(const std::vector<double>& sq) {
    double m = 0.0, m2 = 0.0;
    for (double v : sq) m += v;
    m /= sq.size();
    for (double v : sq) m2 += (v - m) * (v - m);
    return {m, std::sqrt(m2 / (sq.size() - 1) / sq.size())};
}

}  // namespace

TEST_CASE("draw_direct") {
    auto cfg = small_scene(4, 0, 2);
    LargeScaleGains g;
    g.l_g = 1.0;
    g.l_d = {0.0, 2.5e-9};
    g.l_i = {1.0, 1.0};

    SUBCASE("zero gain gives a zero column") {
        auto rng = make_stream(1, StreamTag::Test);
        auto h = draw_direct(cfg, g, rng);
        CHECK(h.col(0).norm() == 0.0);
        CHECK(h.col(1).norm() > 0.0);
    }
    SUBCASE("unit second moment after normalisation") {
        auto rng = make_stream(2, StreamTag::Test);
        double acc = 0.0;
        const int draws = 100000;
        for (int t = 0; t < draws; ++t) acc += draw_direct(cfg, g, rng).col(1).squaredNorm() / g.l_d[1];
        CHECK(acc / (draws * 4.0) == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("fixed seed repeats") {
        auto a = make_stream(3, StreamTag::Test);
        auto b = make_stream(3, StreamTag::Test);
        CHECK(draw_direct(cfg, g, a) == draw_direct(cfg, g, b));
    }
}

TEST_CASE("draw_dirs_lu") {
    auto cfg = small_scene(4, 4, 2);
    LargeScaleGains g;
    g.l_d = {1.0, 1.0};
    g.l_i = {3e-11, 0.0};

    auto rng = make_stream(4, StreamTag::Test);
    CHECK(draw_dirs_lu(cfg, g, rng).col(1).norm() == 0.0);

    double acc = 0.0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) acc += draw_dirs_lu(cfg, g, rng).col(0).squaredNorm() / g.l_i[0];
    CHECK(acc / (draws * 4.0) == doctest::Approx(1.0).epsilon(0.02));

    auto a = make_stream(5, StreamTag::Test);
    auto b = make_stream(5, StreamTag::Test);
    CHECK(draw_dirs_lu(cfg, g, a) == draw_dirs_lu(cfg, g, b));
}

TEST_CASE("draw_bs_dirs: pure LOS limit") {
    auto cfg = small_scene(8, 32, 2);
    cfg.rician_factors = {1e12};
    auto gains = default_gains(cfg);
    auto rng = make_stream(6, StreamTag::Test);
    auto bd = draw_bs_dirs(cfg, gains, rng);
    const double s = std::sqrt(gains.l_g);
    CHECK(bd.aoa.size() == 32);
    for (Eigen::Index i = 0; i < bd.g.size(); ++i) CHECK(std::abs(bd.g(i)) == doctest::Approx(s).epsilon(1e-5));
}

TEST_CASE("draw_bs_dirs: zero Rician factor leaves only the scattered part") {
    auto cfg = small_scene(8, 32, 2);
    cfg.rician_factors = {0.0};
    auto gains = default_gains(cfg);
    auto rng = make_stream(7, StreamTag::Test);
    auto bd = draw_bs_dirs(cfg, gains, rng);

    auto oracle_rng = make_stream(7, StreamTag::Test);
    auto aoa = draw_aoa(cfg, oracle_rng);
    CMatrix nlos = complex_normal_matrix(32, 8, oracle_rng) * std::sqrt(gains.l_g);
    CHECK(aoa == bd.aoa);
    CHECK((bd.g - nlos).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("draw_bs_dirs: Rician second moment equals L_G") {
    auto cfg = small_scene(10, 100, 2);
    auto gains = default_gains(cfg);
    auto rng = make_stream(8, StreamTag::Test);
    double acc = 0.0;
    const int draws = 100;  // 10^5 entries
    for (int t = 0; t < draws; ++t) acc += draw_bs_dirs(cfg, gains, rng).g.squaredNorm();
    CHECK(acc / (draws * 1000.0) == doctest::Approx(gains.l_g).epsilon(0.02));
}

TEST_CASE("draw_bs_dirs: per-antenna Rician factors scale columns") {
    auto cfg = small_scene(3, 16, 2);
    cfg.rician_factors = {0.0, 1e12, 0.0};
    auto gains = default_gains(cfg);
    auto rng = make_stream(9, StreamTag::Test);
    auto bd = draw_bs_dirs(cfg, gains, rng);
    auto los = los_matrix(bd.aoa, 3, 0.5);
    const double s = std::sqrt(gains.l_g);
    CHECK((bd.g.col(1) - s * los.col(1)).norm() < 1e-5 * s * 4.0);
}

TEST_CASE("draw_bs_dirs: frozen AoAs are reused") {
    auto cfg = small_scene(4, 8, 2);
    auto gains = default_gains(cfg);
    std::vector<double> aoa(8, 0.25);
    auto rng = make_stream(10, StreamTag::Test);
    auto bd = draw_bs_dirs(cfg, gains, rng, &aoa);
    CHECK(bd.aoa == aoa);
    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(draw_bs_dirs(cfg, gains, rng, &wrong), ContractViolation);
}

TEST_CASE("AoAs stay inside the configured half-range") {
    auto cfg = small_scene(4, 5000, 2);
    cfg.theta_a = 0.3;
    auto rng = make_stream(11, StreamTag::Test);
    for (double t : draw_aoa(cfg, rng)) {
        CHECK(t >= -0.3);
        CHECK(t <= 0.3);
    }
}

TEST_CASE("LOS matrix is unit modulus with the ULA phase progression") {
    std::vector<double> aoa{-1.2, 0.0, 0.4, 1.5};
    auto los = los_matrix(aoa, 64, 0.5);
    for (Eigen::Index r = 0; r < los.rows(); ++r)
        for (Eigen::Index n = 0; n < los.cols(); ++n) {
            CHECK(std::abs(std::abs(los(r, n)) - 1.0) < 1e-15);
            const double expect = std::numbers::pi * static_cast<double>(n) * std::sin(aoa[static_cast<std::size_t>(r)]);
            CHECK(std::abs(los(r, n) - std::polar(1.0, expect)) < 1e-12);
        }
}

TEST_CASE("draw_bs_dirs agrees with the explicit LOS matrix") {
    auto cfg = small_scene(16, 12, 2);
    auto gains = default_gains(cfg);
    auto rng = make_stream(12, StreamTag::Test);
    auto bd = draw_bs_dirs(cfg, gains, rng);

    auto oracle_rng = make_stream(12, StreamTag::Test);
    auto aoa = draw_aoa(cfg, oracle_rng);
    CMatrix nlos = complex_normal_matrix(12, 16, oracle_rng);
    CMatrix expect = std::sqrt(gains.l_g) * (std::sqrt(10.0 / 11.0) * los_matrix(aoa, 16, 0.5) + std::sqrt(1.0 / 11.0) * nlos);
    CHECK((bd.g - expect).cwiseAbs().maxCoeff() < 1e-12 * std::sqrt(gains.l_g));
}

TEST_CASE("compose_dirs_channel") {
    SUBCASE("no reflector") {
        CMatrix g(0, 4), h_i(0, 3);
        CVector phi(0);
        auto h = compose_dirs_channel(g, h_i, phi);
        CHECK(h.rows() == 4);
        CHECK(h.cols() == 3);
        CHECK(h.norm() == 0.0);
    }
    SUBCASE("1x1 case") {
        CMatrix g(1, 1), h_i(1, 1);
        g(0, 0) = cd(0.3, -1.1);
        h_i(0, 0) = cd(2.0, 0.5);
        CVector phi = CVector::Ones(1);
        auto h = compose_dirs_channel(g, h_i, phi);
        CHECK(std::abs(h(0, 0) - std::conj(g(0, 0)) * h_i(0, 0)) < 1e-15);
    }
    SUBCASE("length mismatch") {
        CMatrix g = CMatrix::Ones(3, 2), h_i = CMatrix::Ones(3, 2);
        CHECK_THROWS_AS(compose_dirs_channel(g, h_i, CVector::Ones(2)), ContractViolation);
    }
    SUBCASE("matches an explicit elementwise sum") {
        auto rng = make_stream(13, StreamTag::Test);
        CMatrix g = complex_normal_matrix(6, 3, rng), h_i = complex_normal_matrix(6, 2, rng);
        auto pv = random_phases(6, PhaseResolution::continuous(), rng);
        auto h = compose_dirs_channel(g, h_i, pv.coeffs);
        for (int n = 0; n < 3; ++n)
            for (int k = 0; k < 2; ++k) {
                cd acc = 0.0;
                for (int r = 0; r < 6; ++r) acc += std::conj(g(r, n)) * pv.coeffs(r) * h_i(r, k);
                CHECK(std::abs(h(n, k) - acc) < 1e-13);
            }
    }
}

TEST_CASE("cascade second moment is L_G L_I,k N_D") {
    // Default geometry with a reduced array keeps the draw count high.
    auto cfg = small_scene(8, 256, 4);
    auto gains = default_gains(cfg);
    auto rng = make_stream(14, StreamTag::Test);
    const int draws = 3000;
    std::vector<std::vector<double>> sq(4);
    for (int t = 0; t < draws; ++t) {
        auto real = draw_realization(cfg, gains, rng);
        auto pv = random_phases(256, cfg.phase_resolution, rng);
        auto h = compose_dirs_channel(real, pv);
        for (int k = 0; k < 4; ++k) sq[k].push_back(std::norm(h(t % 8, k)));
    }
    for (int k = 0; k < 4; ++k) {
        const double target = gains.l_g * gains.l_i[k] * 256.0;
        auto m = second_moment(sq[k]);
        CHECK(std::abs(m.mean - target) <= 3.0 * m.se);
        CHECK(m.mean == doctest::Approx(target).epsilon(0.05));
    }
}

TEST_CASE("direct and cascaded channels are uncorrelated") {
    auto cfg = small_scene(8, 64, 2);
    auto gains = default_gains(cfg);
    auto rng = make_stream(15, StreamTag::Test);
    const int draws = 20000;
    cd cross = 0.0;
    double px = 0.0, py = 0.0;
    for (int t = 0; t < draws; ++t) {
        auto real = draw_realization(cfg, gains, rng);
        auto pv = random_phases(64, cfg.phase_resolution, rng);
        const cd x = real.h_d(0, 0);
        const cd y = compose_dirs_channel(real, pv)(0, 0);
        cross += x * std::conj(y);
        px += std::norm(x);
        py += std::norm(y);
    }
    const double rho = std::abs(cross) / std::sqrt(px * py);
    CHECK(rho < 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("CLT: normalised inner products have variance L_d,k L_d,i") {
    for (int n_t : {64, 256}) {
        auto cfg = small_scene(n_t, 0, 2);
        auto gains = default_gains(cfg);
        auto rng = make_stream(16, StreamTag::Test, static_cast<std::uint64_t>(n_t));
        const int draws = 6000;
        double acc = 0.0;
        for (int t = 0; t < draws; ++t) {
            auto h = draw_direct(cfg, gains, rng);
            acc += std::norm(h.col(0).dot(h.col(1))) / n_t;
        }
        CHECK(acc / draws == doctest::Approx(gains.l_d[0] * gains.l_d[1]).epsilon(0.05));
    }
}

TEST_CASE("LLN: squared norm over L_d N_t concentrates at 1") {
    auto spread = [](int n_t) {
        auto cfg = small_scene(n_t, 0, 1);
        auto gains = default_gains(cfg);
        auto rng = make_stream(17, StreamTag::Test, static_cast<std::uint64_t>(n_t));
        std::vector<double> v;
        for (int t = 0; t < 2000; ++t) v.push_back(draw_direct(cfg, gains, rng).squaredNorm() / (gains.l_d[0] * n_t));
        double m = 0.0, s = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        for (double x : v) s += (x - m) * (x - m);
        return std::pair{m, std::sqrt(s / (v.size() - 1))};
    };
    auto [m64, s64] = spread(64);
    auto [m256, s256] = spread(256);
    CHECK(m256 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(m64 == doctest::Approx(1.0).epsilon(0.05));
    // deviation scales as 1/sqrt(N_t)
    CHECK(s256 == doctest::Approx(1.0 / 16.0).epsilon(0.1));
    CHECK(s256 < s64);
}

TEST_CASE("draw_aj") {
    auto cfg = small_scene(4, 0, 1);
    auto gains = default_gains(cfg);
    auto rng = make_stream(18, StreamTag::Test);
    auto a = make_stream(18, StreamTag::Test);
    CHECK(draw_aj(cfg, gains, rng).h_j == draw_aj(cfg, gains, a).h_j);

    double acc = 0.0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) acc += draw_aj(cfg, gains, rng).h_j.squaredNorm();
    CHECK(acc / (draws * 4.0) == doctest::Approx(*gains.l_j).epsilon(0.02));

    auto none = gains;
    none.l_j = 0.0;
    CHECK(draw_aj(cfg, none, rng).h_j.norm() == 0.0);

    cfg.aj_position.reset();
    CHECK_THROWS_AS(draw_aj(cfg, large_scale(cfg, {Vec3(0, 160, 0)}), rng), CapabilityError);
}

TEST_CASE("draw_realization is reproducible and finite") {
    auto cfg = small_scene(8, 16, 2);
    auto gains = default_gains(cfg);
    auto a = make_stream(19, StreamTag::Cascade, 4);
    auto b = make_stream(19, StreamTag::Cascade, 4);
    auto ra = draw_realization(cfg, gains, a);
    auto rb = draw_realization(cfg, gains, b);
    CHECK(ra.g == rb.g);
    CHECK(ra.h_i == rb.h_i);
    CHECK(ra.h_d == rb.h_d);
    CHECK(ra.g.rows() == 16);
    CHECK(ra.g.cols() == 8);
    CHECK(ra.h_i.rows() == 16);
    CHECK(ra.h_d.rows() == 8);
    CHECK(ra.g.allFinite());
}

TEST_CASE("matrix CSV round trip") {
    auto rng = make_stream(20, StreamTag::Test);
    CMatrix m = complex_normal_matrix(5, 3, rng) * 1e-6;
    std::stringstream ss;
    write_matrix_csv(ss, m);
    CHECK(ss.str().rfind("row,col,re,im\n", 0) == 0);
    CHECK(read_matrix_csv(ss) == m);

    std::stringstream bad("r,c\n");
    CHECK_THROWS_AS(read_matrix_csv(bad), ConfigError);
}
