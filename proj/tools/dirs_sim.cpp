// SPDX-License-Identifier: Apache-2.0
//
// dirs_sim: experiment runner for the disco-IRS jamming simulator.
//
//   dirs_sim run --config cfg.json --experiment power_sweep --trials 500 --seed 1 --out results/
//   dirs_sim dump-channel --config cfg.json --trial 0 --out dump/
//   dirs_sim pj-trace --config cfg.json --detector zf --out trace.csv

#include "dirs/channel.hpp"
#include "dirs/detect.hpp"
#include "dirs/experiment.hpp"
#include "dirs/jam.hpp"
#include "dirs/rcg.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace dirs;

namespace {

ExperimentSpec load(const std::string& config, std::optional<ExperimentId> id) {
    if (config.empty()) {
        ExperimentSpec spec = default_spec(id.value_or(ExperimentId::PowerSweep));
        validate(spec);
        return spec;
    }
    return validate_and_load(config, id);
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int cmd_run(const std::string& config, const std::string& experiment, std::optional<int> trials,
            std::optional<std::uint64_t> seed, std::optional<unsigned> workers, const fs::path& out_dir) {
    std::optional<ExperimentId> id;
    if (!experiment.empty()) id = parse_experiment_id(experiment);
    ExperimentSpec spec = load(config, id);
    if (trials) spec.scene.trials = *trials;
    if (seed) spec.scene.seed = *seed;
    if (workers) spec.workers = *workers;
    validate(spec);

    fs::create_directories(out_dir);
    const auto start = std::chrono::steady_clock::now();
    const ExperimentOutput result = run_experiment(spec);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string csv_name = std::string(to_string(spec.id)) + ".csv";
    {
        std::ofstream csv(out_dir / csv_name);
        write_csv(csv, result.rows);
    }
    nlohmann::json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["generated_at"] = utc_now();
    manifest["csv"] = csv_name;
    manifest["columns"] = std::string(kCsvHeader);
    manifest["spec"] = to_json(spec);
    manifest["rows"] = result.rows.size();
    manifest["zf_redraws"] = result.redraws;
    manifest["errors"] = result.errors;
    manifest["elapsed_seconds"] = elapsed;
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << '\n';

    std::cerr << "wrote " << result.rows.size() << " rows to " << (out_dir / csv_name).string() << " in " << elapsed
              << " s";
    if (result.redraws) std::cerr << " (" << result.redraws << " ZF redraws)";
    std::cerr << '\n';
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    return result.errors.empty() ? 0 : 2;
}

int cmd_dump(const std::string& config, std::uint64_t trial, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
    ExperimentSpec spec = load(config, std::nullopt);
    if (seed) spec.scene.seed = *seed;
    const SceneConfig& cfg = spec.scene;
    auto place = make_stream(cfg.seed, StreamTag::Placement);
    const LargeScaleGains gains = large_scale(cfg, place_users(cfg, place));
    auto direct = make_stream(cfg.seed, StreamTag::Direct, trial);
    auto cascade = make_stream(cfg.seed, StreamTag::Cascade, trial);
    auto phases = make_stream(cfg.seed, StreamTag::Phases, trial);
    ChannelRealization real;
    real.h_d = draw_direct(cfg, gains, direct);
    auto bd = draw_bs_dirs(cfg, gains, cascade);
    real.g = std::move(bd.g);
    real.h_i = draw_dirs_lu(cfg, gains, cascade);
    const PhaseVector phi = random_phases(static_cast<std::size_t>(cfg.n_dirs_elements), cfg.phase_resolution, phases,
                                          cfg.phase_distribution);
    fs::create_directories(out_dir);
    auto dump = [&](const char* name, const CMatrix& m) {
        std::ofstream f(out_dir / name);
        write_matrix_csv(f, m);
    };
    dump("h_d.csv", real.h_d);
    dump("g.csv", real.g);
    dump("h_i.csv", real.h_i);
    dump("phi.csv", CMatrix(phi.coeffs));
    dump("h_dirs.csv", compose_dirs_channel(real, phi));
    std::cerr << "wrote realization " << trial << " to " << out_dir.string() << '\n';
    return 0;
}

int cmd_pj_trace(const std::string& config, const std::string& detector, std::uint64_t trial, const fs::path& out) {
    ExperimentSpec spec = load(config, std::nullopt);
    const SceneConfig& cfg = spec.scene;
    auto place = make_stream(cfg.seed, StreamTag::Placement);
    const LargeScaleGains gains = large_scale(cfg, place_users(cfg, place));
    auto direct = make_stream(cfg.seed, StreamTag::Direct, trial);
    auto cascade = make_stream(cfg.seed, StreamTag::Cascade, trial);
    ChannelRealization real;
    real.gains = gains;
    real.h_d = draw_direct(cfg, gains, direct);
    auto bd = draw_bs_dirs(cfg, gains, cascade);
    real.g = std::move(bd.g);
    real.h_i = draw_dirs_lu(cfg, gains, cascade);
    const DetectorMatrix det = build_detector(detector == "mrc" ? DetectorKind::MRC : DetectorKind::ZF, real.h_d);
    RcgOptions opt;
    opt.p_d_watts = dbm_to_watts(cfg.p_d_dbm);
    opt.noise_watts = noise_watts(cfg);
    opt.resolution = cfg.phase_resolution;
    opt.seed = cfg.seed;
    const RcgResult res = optimize(real, det, opt);
    std::ofstream f(out);
    write_trace_csv(f, res.trace);
    std::cerr << "objective " << res.initial_objective << " -> " << res.objective_continuous << " (continuous), "
              << res.objective_quantized << " (quantized) after " << res.iterations << " iterations\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disco-IRS jamming link-level simulator"};
    app.require_subcommand(1);

    std::string config, experiment, out, detector = "zf";
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::uint64_t trial = 0;

    auto* run = app.add_subcommand("run", "Run one experiment sweep and write <experiment>.csv + manifest.json");
    run->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    run->add_option("--experiment", experiment, "power_sweep | nd_sweep | bits_sweep | dbd_sweep | nt_sweep | "
                                                "nt_nd_locked_sweep | k_sweep");
    run->add_option("--trials", trials, "Monte Carlo trials per grid point")->check(CLI::Range(2, 100000000));
    run->add_option("--seed", seed, "Experiment seed");
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");
    run->add_option("--out", out, "Output directory")->required();

    auto* dump = app.add_subcommand("dump-channel", "Write one channel realization as CSV matrices");
    dump->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    dump->add_option("--trial", trial, "Trial index");
    dump->add_option("--seed", seed, "Experiment seed");
    dump->add_option("--out", out, "Output directory")->required();

    auto* trace = app.add_subcommand("pj-trace", "Run the RCG passive jammer on one realization, write its trace");
    trace->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    trace->add_option("--detector", detector, "zf | mrc")->check(CLI::IsMember({"zf", "mrc"}));
    trace->add_option("--trial", trial, "Trial index");
    trace->add_option("--out", out, "Trace CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, experiment, trials, seed, workers, out);
        if (*dump) return cmd_dump(config, trial, seed, out);
        if (*trace) return cmd_pj_trace(config, detector, trial, out);
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
