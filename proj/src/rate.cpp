// SPDX-License-Identifier: Apache-2.0

#include "dirs/rate.hpp"

#include "dirs/jam.hpp"
#include "dirs/rcg.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace dirs {

namespace {

void check_user(const CMatrix& m, Eigen::Index k, const char* who) {
    if (k < 0 || k >= m.cols()) throw ContractViolation(std::string(who) + ": user index out of range");
}

/// sum_i |x^H M_i|^2 over the columns of M, zero for an empty or all-zero M.
double projected_power(const CVector& x, const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() != x.size()) throw ContractViolation("projected_power: row count mismatch");
    return (x.adjoint() * m).squaredNorm();
}

}  // namespace

double sinr_mrc_dirs(const CMatrix& h_d, const CMatrix& h_dirs, Eigen::Index k, double p_d_watts,
                     double noise_watts) {
    check_user(h_d, k, "sinr_mrc_dirs");
    const CVector h_k = h_d.col(k);
    const double norm2 = h_k.squaredNorm();
    if (!(norm2 > 0.0)) throw DomainError("sinr_mrc_dirs: degenerate channel, ||h_d,k|| = 0");
    const double iui = projected_power(h_k, h_d) - norm2 * norm2;
    const double aca = projected_power(h_k, h_dirs);
    return p_d_watts * norm2 * norm2 / (p_d_watts * std::max(iui, 0.0) + p_d_watts * aca + noise_watts * norm2);
}

double sinr_zf_dirs(const DetectorMatrix& det, const CMatrix& h_dirs, Eigen::Index k, double p_d_watts,
                    double noise_watts) {
    if (det.kind != DetectorKind::ZF) throw ContractViolation("sinr_zf_dirs: detector is not ZF");
    check_user(det.w, k, "sinr_zf_dirs");
    const CVector w_k = det.w.col(k);
    return p_d_watts / (p_d_watts * projected_power(w_k, h_dirs) + noise_watts * w_k.squaredNorm());
}

double sinr_aj(const DetectorMatrix& det, const CMatrix& h_d, const CVector& h_j, Eigen::Index k,
               double p_d_watts, double p_j_watts, double noise_watts) {
    check_user(h_d, k, "sinr_aj");
    if (det.w.rows() != h_d.rows() || det.w.cols() != h_d.cols())
        throw ContractViolation("sinr_aj: detector shape differs from H_d");
    const CVector w_k = det.w.col(k);
    const CVector out = det.w.col(k).adjoint() * h_d;  // w_k^H h_d,i for all i
    const double signal = std::norm(out(k));
    const double iui = out.squaredNorm() - signal;
    const double jam = h_j.size() == 0 ? 0.0 : aj_interference_power(w_k, h_j, p_j_watts);
    return p_d_watts * signal / (p_d_watts * std::max(iui, 0.0) + jam + noise_watts * w_k.squaredNorm());
}

double sinr_pj(const DetectorMatrix& det, const CMatrix& h_d, const CMatrix& h_dirs, Eigen::Index k,
               double p_d_watts, double noise_watts) {
    check_user(h_d, k, "sinr_pj");
    const CVector w_k = det.w.col(k);
    const CMatrix total = h_dirs.size() == 0 ? h_d : CMatrix(h_d + h_dirs);
    const CVector out = w_k.adjoint() * total;
    const double signal = std::norm(out(k));
    const double iui = out.squaredNorm() - signal;
    return p_d_watts * signal / (p_d_watts * std::max(iui, 0.0) + noise_watts * w_k.squaredNorm());
}

// ---------------------------------------------------------------------------

std::string Scenario::name() const {
    const std::string det = detector == DetectorKind::ZF ? "zf" : "mrc";
    switch (jam) {
        case JamKind::NoJam: return "nojam_" + det;
        case JamKind::DIRS: return "dirs_" + det;
        case JamKind::PJ: return "pj_" + det;
        case JamKind::AJ: {
            if (!p_j_dbm) return "aj_" + det;
            char buf[48];
            std::snprintf(buf, sizeof buf, "aj_%s@%g", det.c_str(), *p_j_dbm);
            return buf;
        }
    }
    return "unknown";
}

Scenario Scenario::parse(const std::string& name) {
    Scenario s;
    std::string head = name;
    if (const auto at = name.find('@'); at != std::string::npos) {
        head = name.substr(0, at);
        const std::string power = name.substr(at + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(power, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != power.size()) throw ConfigError("scenario '" + name + "': bad jamming power");
        s.p_j_dbm = v;
    }
    const auto us = head.find('_');
    if (us == std::string::npos) throw ConfigError("scenario '" + name + "': expected <jam>_<detector>");
    const std::string jam = head.substr(0, us), det = head.substr(us + 1);
    if (det == "zf") s.detector = DetectorKind::ZF;
    else if (det == "mrc") s.detector = DetectorKind::MRC;
    else throw ConfigError("scenario '" + name + "': unknown detector '" + det + "'");
    if (jam == "nojam") s.jam = JamKind::NoJam;
    else if (jam == "dirs") s.jam = JamKind::DIRS;
    else if (jam == "aj") s.jam = JamKind::AJ;
    else if (jam == "pj") s.jam = JamKind::PJ;
    else throw ConfigError("scenario '" + name + "': unknown jammer '" + jam + "'");
    if (s.p_j_dbm && s.jam != JamKind::AJ) throw ConfigError("scenario '" + name + "': only AJ takes a power");
    return s;
}

ErgodicEstimate summarize(std::span<const double> rates, int trials, int n_users) {
    if (trials < 1 || n_users < 1 || rates.size() != static_cast<std::size_t>(trials) * static_cast<std::size_t>(n_users))
        throw ContractViolation("summarize: table size does not match trials x users");
    ErgodicEstimate est;
    est.trials = trials;
    const auto ku = static_cast<std::size_t>(n_users);
    est.mean.assign(ku, 0.0);
    est.variance.assign(ku, 0.0);
    est.ci_half.assign(ku, 0.0);
    std::vector<double> avg(static_cast<std::size_t>(trials), 0.0);
    for (int t = 0; t < trials; ++t)
        for (std::size_t k = 0; k < ku; ++k) {
            const double r = rates[static_cast<std::size_t>(t) * ku + k];
            est.mean[k] += r;
            avg[static_cast<std::size_t>(t)] += r / static_cast<double>(n_users);
        }
    for (double& m : est.mean) m /= trials;
    for (double a : avg) est.avg_mean += a;
    est.avg_mean /= trials;
    if (trials > 1) {
        for (int t = 0; t < trials; ++t) {
            for (std::size_t k = 0; k < ku; ++k) {
                const double d = rates[static_cast<std::size_t>(t) * ku + k] - est.mean[k];
                est.variance[k] += d * d;
            }
            const double d = avg[static_cast<std::size_t>(t)] - est.avg_mean;
            est.avg_variance += d * d;
        }
        for (double& v : est.variance) v /= trials - 1;
        est.avg_variance /= trials - 1;
    }
    for (std::size_t k = 0; k < ku; ++k) est.ci_half[k] = 1.96 * std::sqrt(est.variance[k] / trials);
    est.avg_ci_half = 1.96 * std::sqrt(est.avg_variance / trials);
    est.sum_rate_mean = est.avg_mean * n_users;
    return est;
}

namespace {

struct TrialNeeds {
    bool zf = false, mrc = false, cascade = false, aj = false;
};

TrialNeeds needs_of(std::span<const Scenario> scenarios) {
    TrialNeeds n;
    for (const auto& s : scenarios) {
        (s.detector == DetectorKind::ZF ? n.zf : n.mrc) = true;
        if (s.jam == JamKind::DIRS || s.jam == JamKind::PJ) n.cascade = true;
        if (s.jam == JamKind::AJ) n.aj = true;
    }
    return n;
}

/// Fills rates[p][s][k] for one trial.
void run_trial(const SceneConfig& cfg, std::span<const Scenario> scenarios, std::span<const double> p_d_watts,
               double noise, const LargeScaleGains& gains, const std::vector<double>* frozen_aoa,
               std::uint64_t seed, std::uint64_t trial, const MonteCarloOptions& opt, double* out,
               std::atomic<int>& redraws) {
    const TrialNeeds need = needs_of(scenarios);
    const auto k_users = static_cast<std::size_t>(cfg.n_users);

    for (std::uint32_t attempt = 0;; ++attempt) {
        auto direct_rng = make_stream(seed, StreamTag::Direct, trial, attempt);
        CMatrix h_d = draw_direct(cfg, gains, direct_rng);
        DetectorMatrix det_zf, det_mrc;
        try {
            if (need.zf) det_zf = zf(h_d);
        } catch (const SingularityError& e) {
            redraws.fetch_add(1);
            if (static_cast<int>(attempt) >= opt.max_redraws) {
                std::ostringstream msg;
                msg << "trial " << trial << ": " << e.what() << " after " << attempt << " redraws";
                throw SingularityError(msg.str(), e.condition());
            }
            std::fprintf(stderr, "trial %llu attempt %u: ZF rank failure (cond %.3g), redrawing\n",
                         static_cast<unsigned long long>(trial), attempt, e.condition());
            continue;
        }
        if (need.mrc) det_mrc = mrc(h_d);

        ChannelRealization real;
        real.gains = gains;
        real.h_d = std::move(h_d);
        CMatrix h_dirs = CMatrix::Zero(cfg.n_antennas, cfg.n_users);
        if (need.cascade) {
            auto cascade_rng = make_stream(seed, StreamTag::Cascade, trial, attempt);
            auto bd = draw_bs_dirs(cfg, gains, cascade_rng, frozen_aoa);
            real.g = std::move(bd.g);
            real.aoa = std::move(bd.aoa);
            real.h_i = draw_dirs_lu(cfg, gains, cascade_rng);
            auto phase_rng = make_stream(seed, StreamTag::Phases, trial, attempt);
            const PhaseVector phi = random_phases(static_cast<std::size_t>(cfg.n_dirs_elements),
                                                  cfg.phase_resolution, phase_rng, cfg.phase_distribution);
            h_dirs = compose_dirs_channel(real, phi);
        } else {
            real.g = CMatrix::Zero(0, cfg.n_antennas);
            real.h_i = CMatrix::Zero(0, cfg.n_users);
        }
        CVector h_j;
        if (need.aj) {
            auto aj_rng = make_stream(seed, StreamTag::Aj, trial, attempt);
            h_j = draw_aj(cfg, gains, aj_rng).h_j;
        }

        for (std::size_t p = 0; p < p_d_watts.size(); ++p) {
            for (std::size_t s = 0; s < scenarios.size(); ++s) {
                const Scenario& sc = scenarios[s];
                const DetectorMatrix& det = sc.detector == DetectorKind::ZF ? det_zf : det_mrc;
                double* row = out + (p * scenarios.size() + s) * k_users;
                std::vector<double> pj_rates;
                if (sc.jam == JamKind::PJ) {
                    RcgOptions ro;
                    ro.p_d_watts = p_d_watts[p];
                    ro.noise_watts = noise;
                    ro.resolution = cfg.phase_resolution;
                    ro.seed = seed ^ (trial * 0x9E3779B97F4A7C15ULL);
                    ro.record_trace = false;
                    const RcgResult rr = optimize(real, det, ro);
                    const CMatrix h_pj = compose_dirs_channel(real, rr.quantized);
                    for (std::size_t k = 0; k < k_users; ++k)
                        row[k] = rate_from_sinr(sinr_pj(det, real.h_d, h_pj, static_cast<Eigen::Index>(k), p_d_watts[p], noise));
                    continue;
                }
                for (std::size_t k = 0; k < k_users; ++k) {
                    const auto kk = static_cast<Eigen::Index>(k);
                    double sinr = 0.0;
                    switch (sc.jam) {
                        case JamKind::NoJam:
                            sinr = sc.detector == DetectorKind::ZF
                                       ? sinr_zf_dirs(det, CMatrix(), kk, p_d_watts[p], noise)
                                       : sinr_mrc_dirs(real.h_d, CMatrix(), kk, p_d_watts[p], noise);
                            break;
                        case JamKind::DIRS:
                            sinr = sc.detector == DetectorKind::ZF
                                       ? sinr_zf_dirs(det, h_dirs, kk, p_d_watts[p], noise)
                                       : sinr_mrc_dirs(real.h_d, h_dirs, kk, p_d_watts[p], noise);
                            break;
                        case JamKind::AJ:
                            sinr = sinr_aj(det, real.h_d, h_j, kk, p_d_watts[p],
                                           dbm_to_watts(sc.p_j_dbm.value_or(cfg.p_j_dbm)), noise);
                            break;
                        case JamKind::PJ: break;
                    }
                    row[k] = rate_from_sinr(sinr);
                }
            }
        }
        return;
    }
}

}  // namespace

MonteCarloResult estimate_ergodic(const SceneConfig& cfg, std::span<const Scenario> scenarios,
                                  std::span<const double> p_d_dbm, const MonteCarloOptions& opt) {
    validate(cfg);
    if (opt.trials < 2) throw DomainError("estimate_ergodic: needs at least 2 trials");
    if (scenarios.empty() || p_d_dbm.empty()) throw ContractViolation("estimate_ergodic: nothing to evaluate");
    for (const auto& s : scenarios)
        if (s.jam == JamKind::AJ && !cfg.aj_position)
            throw CapabilityError("scenario " + s.name() + " needs aj_position");

    MonteCarloResult res;
    {
        auto rng = make_stream(opt.seed, StreamTag::Placement);
        res.users = place_users(cfg, rng);
        res.gains = large_scale(cfg, res.users);
    }
    std::optional<std::vector<double>> frozen_aoa;
    if (cfg.freeze_aoa) {
        auto rng = make_stream(opt.seed, StreamTag::Aoa);
        frozen_aoa = draw_aoa(cfg, rng);
    }

    std::vector<double> p_watts;
    for (double p : p_d_dbm) p_watts.push_back(dbm_to_watts(p));
    const double noise = noise_watts(cfg);

    const std::size_t per_trial = p_watts.size() * scenarios.size() * static_cast<std::size_t>(cfg.n_users);
    std::vector<double> table(per_trial * static_cast<std::size_t>(opt.trials));
    std::atomic<int> redraws{0};
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (int t = next.fetch_add(1); t < opt.trials; t = next.fetch_add(1)) {
            try {
                const std::uint64_t trial = opt.repeat_trial_seed ? 0 : static_cast<std::uint64_t>(t);
                LargeScaleGains gains = res.gains;
                if (cfg.redraw_users_per_trial) {
                    auto rng = make_stream(opt.seed, StreamTag::Placement, trial + 1);
                    gains = large_scale(cfg, place_users(cfg, rng));
                }
                run_trial(cfg, scenarios, p_watts, noise, gains, frozen_aoa ? &*frozen_aoa : nullptr, opt.seed, trial,
                          opt, table.data() + per_trial * static_cast<std::size_t>(t), redraws);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(opt.trials);
            }
        }
    };
    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(opt.trials));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    res.redraws = redraws.load();

    const auto k_users = static_cast<std::size_t>(cfg.n_users);
    res.estimates.assign(p_watts.size(), std::vector<ErgodicEstimate>(scenarios.size()));
    std::vector<double> column(static_cast<std::size_t>(opt.trials) * k_users);
    for (std::size_t p = 0; p < p_watts.size(); ++p)
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            const std::size_t offset = (p * scenarios.size() + s) * k_users;
            for (std::size_t t = 0; t < static_cast<std::size_t>(opt.trials); ++t)
                for (std::size_t k = 0; k < k_users; ++k) column[t * k_users + k] = table[t * per_trial + offset + k];
            res.estimates[p][s] = summarize(column, opt.trials, cfg.n_users);
        }
    return res;
}

MonteCarloResult estimate_ergodic(const SceneConfig& cfg, std::span<const Scenario> scenarios,
                                  const MonteCarloOptions& opt) {
    const double p = cfg.p_d_dbm;
    return estimate_ergodic(cfg, scenarios, std::span<const double>(&p, 1), opt);
}

}  // namespace dirs
