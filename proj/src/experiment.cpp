// SPDX-License-Identifier: Apache-2.0

#include "dirs/experiment.hpp"

#include "dirs/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <utility>

namespace dirs {

namespace {

constexpr std::array<std::pair<ExperimentId, std::string_view>, 7> kExperimentNames{{
    {ExperimentId::PowerSweep, "power_sweep"},
    {ExperimentId::NdSweep, "nd_sweep"},
    {ExperimentId::BitsSweep, "bits_sweep"},
    {ExperimentId::DbdSweep, "dbd_sweep"},
    {ExperimentId::NtSweep, "nt_sweep"},
    {ExperimentId::NtNdLockedSweep, "nt_nd_locked_sweep"},
    {ExperimentId::KSweep, "k_sweep"},
}};

constexpr std::array<std::pair<BoundKind, std::string_view>, 4> kBoundNames{{
    {BoundKind::Prop2, "prop2"},
    {BoundKind::Prop3, "prop3"},
    {BoundKind::NoJamZf, "nojam_zf_bound"},
    {BoundKind::NoJamMrc, "nojam_mrc_bound"},
}};

[[noreturn]] void fail(const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); }

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

std::string_view to_string(ExperimentId id) {
    for (const auto& [k, v] : kExperimentNames)
        if (k == id) return v;
    return "unknown";
}

ExperimentId parse_experiment_id(std::string_view name) {
    for (const auto& [k, v] : kExperimentNames)
        if (v == name) return k;
    fail("experiment", "unknown experiment id '" + std::string(name) + "'");
}

std::string_view sweep_variable(ExperimentId id) {
    switch (id) {
        case ExperimentId::PowerSweep: return "p_d_dbm";
        case ExperimentId::NdSweep: return "n_dirs_elements";
        case ExperimentId::BitsSweep: return "phase_bits";
        case ExperimentId::DbdSweep: return "d_bd_m";
        case ExperimentId::NtSweep: return "n_antennas";
        case ExperimentId::NtNdLockedSweep: return "n_antennas";
        case ExperimentId::KSweep: return "n_users";
    }
    return "unknown";
}

std::vector<double> default_grid(ExperimentId id) {
    switch (id) {
        case ExperimentId::PowerSweep: {
            std::vector<double> g;
            for (int p = -20; p <= 10; ++p) g.push_back(p);
            return g;
        }
        case ExperimentId::NdSweep: return {256, 512, 1024, 2048, 4096};
        case ExperimentId::BitsSweep: return {1, 2, 3};
        case ExperimentId::DbdSweep: return {2, 4, 6, 8, 10};
        case ExperimentId::NtSweep: return {64, 128, 256, 512};
        case ExperimentId::NtNdLockedSweep: return {64, 128, 256};
        case ExperimentId::KSweep: return {2, 4, 8, 12, 16};
    }
    return {};
}

std::string_view to_string(BoundKind b) {
    for (const auto& [k, v] : kBoundNames)
        if (k == b) return v;
    return "unknown";
}

BoundKind parse_bound(std::string_view name) {
    for (const auto& [k, v] : kBoundNames)
        if (v == name) return k;
    fail("bounds", "unknown bound '" + std::string(name) + "'");
}

Scenario bound_scenario(BoundKind b) {
    switch (b) {
        case BoundKind::Prop2: return {JamKind::DIRS, DetectorKind::MRC, std::nullopt};
        case BoundKind::Prop3: return {JamKind::DIRS, DetectorKind::ZF, std::nullopt};
        case BoundKind::NoJamZf: return {JamKind::NoJam, DetectorKind::ZF, std::nullopt};
        case BoundKind::NoJamMrc: return {JamKind::NoJam, DetectorKind::MRC, std::nullopt};
    }
    return {};
}

ExperimentSpec default_spec(ExperimentId id) {
    ExperimentSpec s;
    s.id = id;
    s.grid = default_grid(id);
    for (const char* name : {"nojam_zf", "nojam_mrc", "dirs_zf", "dirs_mrc", "aj_zf@-4", "aj_zf@4"})
        s.scenarios.push_back(Scenario::parse(name));
    s.bounds = {BoundKind::Prop2, BoundKind::Prop3, BoundKind::NoJamZf, BoundKind::NoJamMrc};
    return s;
}

SceneConfig scene_at(const ExperimentSpec& spec, double v) {
    SceneConfig cfg = spec.scene;
    auto resize_rician = [&] {
        if (cfg.rician_factors.size() != 1) {
            const bool uniform = std::all_of(cfg.rician_factors.begin(), cfg.rician_factors.end(),
                                             [&](double e) { return e == cfg.rician_factors.front(); });
            if (!uniform) fail("scene.rician_factors", "per-antenna factors cannot follow an n_antennas sweep");
            cfg.rician_factors.resize(1);
        }
    };
    switch (spec.id) {
        case ExperimentId::PowerSweep: cfg.p_d_dbm = v; break;
        case ExperimentId::NdSweep: cfg.n_dirs_elements = static_cast<int>(v); break;
        case ExperimentId::BitsSweep: cfg.phase_resolution = PhaseResolution::with_bits(static_cast<int>(v)); break;
        case ExperimentId::DbdSweep: cfg.dirs_position = cfg.bs_position - Vec3(v, 0.0, 0.0); break;
        case ExperimentId::NtSweep:
            cfg.n_antennas = static_cast<int>(v);
            resize_rician();
            break;
        case ExperimentId::NtNdLockedSweep:
            cfg.n_antennas = static_cast<int>(v);
            cfg.n_dirs_elements = 16 * cfg.n_antennas;
            resize_rician();
            break;
        case ExperimentId::KSweep: cfg.n_users = static_cast<int>(v); break;
    }
    return cfg;
}

void validate(const ExperimentSpec& spec) {
    if (spec.grid.empty()) fail("grid", "must not be empty");
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double v = spec.grid[i];
        if (!std::isfinite(v)) fail("grid", "values must be finite");
        if (i > 0 && !(v > spec.grid[i - 1])) fail("grid", "must be sorted strictly ascending");
        if (spec.id != ExperimentId::PowerSweep && spec.id != ExperimentId::DbdSweep && !is_integer(v))
            fail("grid", "values of " + std::string(sweep_variable(spec.id)) + " must be integers");
        if (spec.id == ExperimentId::DbdSweep && !(v > 0.0)) fail("grid", "DIRS distances must be positive");
        if (spec.id == ExperimentId::NdSweep && v < 0) fail("grid", "n_dirs_elements must be non-negative");
        if (spec.id == ExperimentId::BitsSweep && (v < 1 || v > 16)) fail("grid", "phase_bits must be in 1..16");
    }
    if (spec.scenarios.empty()) fail("scenarios", "must not be empty");
    std::set<std::string> names;
    for (const auto& s : spec.scenarios) {
        if (!names.insert(s.name()).second) fail("scenarios", "duplicate scenario " + s.name());
        if (s.jam == JamKind::AJ && !spec.scene.aj_position)
            fail("scenarios", "scenario " + s.name() + " needs scene.aj_position");
    }
    for (BoundKind b : spec.bounds)
        if (!names.count(bound_scenario(b).name()))
            fail("bounds", std::string(to_string(b)) + " needs scenario " + bound_scenario(b).name());
    for (double v : spec.grid) {
        const SceneConfig cfg = scene_at(spec, v);
        validate(cfg);
        if (cfg.trials < 2) fail("scene.trials", "ergodic estimates need at least 2 trials");
        for (BoundKind b : spec.bounds)
            if (b == BoundKind::Prop2 || b == BoundKind::NoJamMrc)
                if (cfg.n_antennas < 3) fail("bounds", "MRC bounds need n_antennas >= 3");
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec3 vec3_from(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) fail(field, "expected [x, y, z]");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) fail(field, "coordinates must be numbers");
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

nlohmann::json vec3_to(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

double number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

int integer(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    const auto v = j.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(field, "out of range");
    return static_cast<int>(v);
}

bool boolean(const nlohmann::json& j, const std::string& field) {
    if (!j.is_boolean()) fail(field, "expected true or false");
    return j.get<bool>();
}

SceneConfig scene_from_json(const nlohmann::json& j) {
    SceneConfig cfg;
    if (!j.is_object()) fail("scene", "expected an object");
    for (const auto& [key, val] : j.items()) {
        const std::string f = "scene." + key;
        if (key == "n_antennas") cfg.n_antennas = integer(val, f);
        else if (key == "n_dirs_elements") cfg.n_dirs_elements = integer(val, f);
        else if (key == "n_users") cfg.n_users = integer(val, f);
        else if (key == "bs_position") cfg.bs_position = vec3_from(val, f);
        else if (key == "dirs_position") cfg.dirs_position = vec3_from(val, f);
        else if (key == "lu_region_center") cfg.lu_region_center = vec3_from(val, f);
        else if (key == "lu_region_radius") cfg.lu_region_radius = number(val, f);
        else if (key == "aj_position") cfg.aj_position = val.is_null() ? std::nullopt : std::optional(vec3_from(val, f));
        else if (key == "p_d_dbm") cfg.p_d_dbm = number(val, f);
        else if (key == "p_j_dbm") cfg.p_j_dbm = number(val, f);
        else if (key == "bandwidth_hz") cfg.bandwidth_hz = number(val, f);
        else if (key == "rician_factors") {
            if (val.is_number()) cfg.rician_factors = {val.get<double>()};
            else if (val.is_array() && !val.empty()) {
                cfg.rician_factors.clear();
                for (const auto& e : val) cfg.rician_factors.push_back(number(e, f));
            } else fail(f, "expected a number or a non-empty array");
        } else if (key == "theta_a") cfg.theta_a = number(val, f);
        else if (key == "element_spacing_over_wavelength") cfg.element_spacing_over_wavelength = number(val, f);
        else if (key == "phase_bits") {
            if (val.is_string() && val.get<std::string>() == "continuous") cfg.phase_resolution = PhaseResolution::continuous();
            else {
                const int b = integer(val, f);
                if (b < 1 || b > 62) fail(f, "must be a positive bit count or \"continuous\"");
                cfg.phase_resolution = PhaseResolution::with_bits(b);
            }
        } else if (key == "phase_support") cfg.phase_distribution.support = number(val, f);
        else if (key == "trials") cfg.trials = integer(val, f);
        else if (key == "seed") {
            if (!val.is_number_unsigned() && !(val.is_number_integer() && val.get<long long>() >= 0))
                fail(f, "expected a non-negative integer");
            cfg.seed = val.get<std::uint64_t>();
        } else if (key == "redraw_users_per_trial") cfg.redraw_users_per_trial = boolean(val, f);
        else if (key == "freeze_aoa") cfg.freeze_aoa = boolean(val, f);
        else fail(f, "unknown key");
    }
    return cfg;
}

}  // namespace

ExperimentSpec spec_from_json(const nlohmann::json& j, std::optional<ExperimentId> override_id) {
    if (!j.is_object()) fail("config", "top level must be a JSON object");
    for (const auto& [key, val] : j.items())
        if (key != "experiment" && key != "grid" && key != "scenarios" && key != "bounds" && key != "workers" &&
            key != "scene")
            fail(key, "unknown key");

    ExperimentId id = ExperimentId::PowerSweep;
    if (j.contains("experiment")) {
        if (!j["experiment"].is_string()) fail("experiment", "expected a string");
        id = parse_experiment_id(j["experiment"].get<std::string>());
    }
    if (override_id) id = *override_id;
    ExperimentSpec spec = default_spec(id);

    if (j.contains("grid")) {
        if (!j["grid"].is_array()) fail("grid", "expected an array");
        spec.grid.clear();
        for (const auto& v : j["grid"]) spec.grid.push_back(number(v, "grid"));
    }
    if (j.contains("scenarios")) {
        if (!j["scenarios"].is_array()) fail("scenarios", "expected an array of names");
        spec.scenarios.clear();
        for (const auto& v : j["scenarios"]) {
            if (!v.is_string()) fail("scenarios", "expected scenario names");
            spec.scenarios.push_back(Scenario::parse(v.get<std::string>()));
        }
    }
    if (j.contains("bounds")) {
        if (!j["bounds"].is_array()) fail("bounds", "expected an array of names");
        spec.bounds.clear();
        for (const auto& v : j["bounds"]) {
            if (!v.is_string()) fail("bounds", "expected bound names");
            spec.bounds.push_back(parse_bound(v.get<std::string>()));
        }
    }
    if (j.contains("workers")) {
        const int w = integer(j["workers"], "workers");
        if (w < 0) fail("workers", "must be non-negative");
        spec.workers = static_cast<unsigned>(w);
    }
    if (j.contains("scene")) spec.scene = scene_from_json(j["scene"]);
    validate(spec);
    return spec;
}

ExperimentSpec validate_and_load(const std::filesystem::path& path, std::optional<ExperimentId> override_id) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return spec_from_json(j, override_id);
}

nlohmann::json to_json(const SceneConfig& cfg) {
    nlohmann::json j;
    j["n_antennas"] = cfg.n_antennas;
    j["n_dirs_elements"] = cfg.n_dirs_elements;
    j["n_users"] = cfg.n_users;
    j["bs_position"] = vec3_to(cfg.bs_position);
    j["dirs_position"] = vec3_to(cfg.dirs_position);
    j["lu_region_center"] = vec3_to(cfg.lu_region_center);
    j["lu_region_radius"] = cfg.lu_region_radius;
    j["aj_position"] = cfg.aj_position ? vec3_to(*cfg.aj_position) : nlohmann::json(nullptr);
    j["p_d_dbm"] = cfg.p_d_dbm;
    j["p_j_dbm"] = cfg.p_j_dbm;
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    if (cfg.rician_factors.size() == 1) j["rician_factors"] = cfg.rician_factors.front();
    else j["rician_factors"] = cfg.rician_factors;
    j["theta_a"] = cfg.theta_a;
    j["element_spacing_over_wavelength"] = cfg.element_spacing_over_wavelength;
    if (cfg.phase_resolution.is_continuous()) j["phase_bits"] = "continuous";
    else j["phase_bits"] = cfg.phase_resolution.bits();
    j["phase_support"] = cfg.phase_distribution.support;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["redraw_users_per_trial"] = cfg.redraw_users_per_trial;
    j["freeze_aoa"] = cfg.freeze_aoa;
    return j;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["experiment"] = std::string(to_string(spec.id));
    j["grid"] = spec.grid;
    auto& sc = j["scenarios"] = nlohmann::json::array();
    for (const auto& s : spec.scenarios) sc.push_back(s.name());
    auto& bd = j["bounds"] = nlohmann::json::array();
    for (BoundKind b : spec.bounds) bd.push_back(std::string(to_string(b)));
    j["workers"] = spec.workers;
    j["scene"] = to_json(spec.scene);
    return j;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<double> bound_for(const ExperimentSpec& spec, const SceneConfig& cfg, const Scenario& s,
                                const LargeScaleGains& gains, double p_d_dbm, int k) {
    if (cfg.redraw_users_per_trial) return std::nullopt;
    for (BoundKind b : spec.bounds) {
        if (!(bound_scenario(b) == s)) continue;
        BoundInput in;
        in.n_antennas = cfg.n_antennas;
        in.n_users = cfg.n_users;
        in.n_dirs_elements = s.jam == JamKind::DIRS ? cfg.n_dirs_elements : 0;
        in.p_d_watts = dbm_to_watts(p_d_dbm);
        in.noise_watts = noise_watts(cfg);
        in.gains = gains;
        in.target_user = k;
        return s.detector == DetectorKind::ZF ? lower_bound_zf(in) : lower_bound_mrc(in);
    }
    return std::nullopt;
}

void append_rows(ExperimentOutput& out, const ExperimentSpec& spec, const SceneConfig& cfg, double sweep_value,
                 double p_d_dbm, const Scenario& s, const ErgodicEstimate* est, const LargeScaleGains* gains) {
    const std::string exp(to_string(spec.id)), var(sweep_variable(spec.id));
    double bound_sum = 0.0;
    bool have_bound = gains != nullptr;
    for (int k = 0; k < cfg.n_users; ++k) {
        ResultRow row{exp, var, sweep_value, s.name(), std::to_string(k + 1), 0.0, 0.0, std::nullopt, cfg.trials, cfg.seed};
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.mean_rate = est ? est->mean[static_cast<std::size_t>(k)] : nan;
        row.ci_half = est ? est->ci_half[static_cast<std::size_t>(k)] : nan;
        if (gains) row.bound = bound_for(spec, cfg, s, *gains, p_d_dbm, k);
        if (row.bound) bound_sum += *row.bound;
        else have_bound = false;
        out.rows.push_back(std::move(row));
    }
    ResultRow avg{exp, var, sweep_value, s.name(), "avg", 0.0, 0.0, std::nullopt, cfg.trials, cfg.seed};
    avg.mean_rate = est ? est->avg_mean : std::numeric_limits<double>::quiet_NaN();
    avg.ci_half = est ? est->avg_ci_half : std::numeric_limits<double>::quiet_NaN();
    if (have_bound) avg.bound = bound_sum / cfg.n_users;
    out.rows.push_back(std::move(avg));
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    ExperimentOutput out;
    MonteCarloOptions opt;
    opt.seed = spec.scene.seed;
    opt.trials = spec.scene.trials;
    opt.workers = spec.workers;

    auto record_failure = [&](const SceneConfig& cfg, double value, double p_d, const std::exception& e) {
        out.errors.push_back(std::string(sweep_variable(spec.id)) + "=" + std::to_string(value) + ": " + e.what());
        for (const auto& s : spec.scenarios) append_rows(out, spec, cfg, value, p_d, s, nullptr, nullptr);
    };

    if (spec.id == ExperimentId::PowerSweep) {
        try {
            const MonteCarloResult mc = estimate_ergodic(spec.scene, spec.scenarios, spec.grid, opt);
            out.redraws = mc.redraws;
            for (std::size_t p = 0; p < spec.grid.size(); ++p)
                for (std::size_t s = 0; s < spec.scenarios.size(); ++s)
                    append_rows(out, spec, spec.scene, spec.grid[p], spec.grid[p], spec.scenarios[s], &mc.estimates[p][s],
                                &mc.gains);
        } catch (const std::exception& e) {
            for (double v : spec.grid) record_failure(spec.scene, v, v, e);
        }
        return out;
    }

    for (double v : spec.grid) {
        const SceneConfig cfg = scene_at(spec, v);
        try {
            const MonteCarloResult mc = estimate_ergodic(cfg, spec.scenarios, opt);
            out.redraws += mc.redraws;
            for (std::size_t s = 0; s < spec.scenarios.size(); ++s)
                append_rows(out, spec, cfg, v, cfg.p_d_dbm, spec.scenarios[s], &mc.estimates[0][s], &mc.gains);
        } catch (const std::exception& e) {
            record_failure(cfg, v, cfg.p_d_dbm, e);
        }
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    char buf[64];
    auto num = [&](double v, const char* fmt) {
        std::snprintf(buf, sizeof buf, fmt, v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.sweep_var << ',' << num(r.sweep_value, "%.10g") << ',' << r.scenario << ','
            << r.user << ',' << num(r.mean_rate, "%.9f") << ',' << num(r.ci_half, "%.9f") << ','
            << (r.bound ? num(*r.bound, "%.9f") : std::string()) << ',' << r.trials << ',' << r.seed << '\n';
    }
}

}  // namespace dirs
