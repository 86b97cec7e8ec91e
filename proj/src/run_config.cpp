#include "spinfb/run_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spinfb/errors.hpp"

namespace spinfb {

using nlohmann::json;

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::kCalibrate: return "calibrate";
        case RunMode::kSweep: return "sweep";
        case RunMode::kMulticycle: return "multicycle";
        case RunMode::kExact: return "exact";
    }
    return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
    if (name == "calibrate") return RunMode::kCalibrate;
    if (name == "sweep") return RunMode::kSweep;
    if (name == "multicycle") return RunMode::kMulticycle;
    if (name == "exact") return RunMode::kExact;
    throw ConfigError("mode", "unknown mode '" + name +
                                  "' (expected calibrate, sweep, multicycle "
                                  "or exact)");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* const kPhysicalKeys[] = {"gamma_mhz", "sigma0_m2", "w0_um",
                                     "s0",        "delta_mhz", "n_photons",
                                     "n_atoms"};

double require_number(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(key, "expected a number for '" + key + "'");
    }
    return v.get<double>();
}

}  // namespace

ChannelParams RunConfig::channel() const {
    ChannelParams c;
    if (physical) {
        c = channel_from_physical(*physical);
    }
    if (kappa) c.kappa = *kappa;
    if (eps_l) c.eps_l = *eps_l;
    if (eps_a) c.eps_a = *eps_a;
    if (eps_l_prime) c.eps_l_prime = *eps_l_prime;
    if (!physical && !kappa) {
        throw ConfigError("kappa",
                          "channel underdetermined: provide physical "
                          "parameters or a direct kappa");
    }
    if (!physical && !eps_l) c.eps_l = 0.042;
    try {
        c.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError("channel", err.what());
    }
    return c;
}

FeedbackConfig RunConfig::feedback_for(double gain, int run_cycles) const {
    FeedbackConfig fb;
    fb.gain = gain;
    fb.cycles = run_cycles;
    fb.clamp_enabled = clamp ? *clamp : (run_cycles >= 2);
    if (x0) {
        fb.x0 = *x0;
    } else {
        FeedbackConfig probe_only;
        probe_only.gain = 0.0;
        probe_only.cycles = 1;
        fb.x0 = 3.0 * std::sqrt(analytic_moments(channel(), probe_only).variance(0));
    }
    return fb;
}

std::vector<double> RunConfig::resolved_gain_grid() const {
    if (gain_grid.empty()) {
        if (mode == RunMode::kExact) {
            // 81 points over [-0.4, 0.4]
            std::vector<double> grid;
            grid.reserve(81);
            for (int i = 0; i < 81; ++i) {
                grid.push_back(-0.4 + 0.8 * static_cast<double>(i) / 80.0);
            }
            return grid;
        }
        return default_gain_grid(channel());
    }
    std::vector<double> grid;
    grid.reserve(gain_grid.size());
    for (const double g : gain_grid) {
        grid.push_back(g * gain_scale);
    }
    return grid;
}

void RunConfig::validate() const {
    if (n_shots < 1) {
        throw ConfigError("n_shots", "n_shots must be >= 1");
    }
    if (n_resamples < 100) {
        throw ConfigError("n_resamples", "n_resamples must be >= 100");
    }
    switch (mode) {
        case RunMode::kCalibrate:
            if (!physical) {
                throw ConfigError("gamma_mhz",
                                  "calibrate requires the physical "
                                  "parameter block");
            }
            break;
        case RunMode::kSweep:
            if (n_shots < 100) {
                throw ConfigError("n_shots", "sweep requires n_shots >= 100");
            }
            channel();
            break;
        case RunMode::kMulticycle:
            if (cycles < 2) {
                throw ConfigError("cycles",
                                  "multicycle requires cycles >= 2");
            }
            channel();
            break;
        case RunMode::kExact:
            if (n_spins < 1) {
                throw ConfigError("n_spins", "exact requires n_spins >= 1");
            }
            break;
    }
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ConfigError("", std::string("config is not valid JSON: ") +
                                  err.what());
    }
    if (!j.is_object()) {
        throw ConfigError("", "config must be a JSON object");
    }

    static const std::set<std::string> known = {
        "mode",      "gamma_mhz",  "sigma0_m2",    "w0_um",
        "s0",        "delta_mhz",  "n_photons",    "n_atoms",
        "kappa",     "eps_l",      "eps_a",        "eps_l_prime",
        "gain",      "x0",         "clamp",        "cycles",
        "gain_grid", "gain_scale", "n_shots",      "n_resamples",
        "seed",      "n_spins",    "out"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(key, "unknown config key '" + key + "'");
        }
    }

    RunConfig cfg;
    if (j.contains("mode")) {
        cfg.mode = parse_run_mode(j.at("mode").get<std::string>());
    }

    bool any_physical = false;
    for (const char* key : kPhysicalKeys) {
        any_physical = any_physical || j.contains(key);
    }
    if (any_physical) {
        for (const char* key : kPhysicalKeys) {
            if (!j.contains(key)) {
                throw ConfigError(key, std::string("missing physical key '") +
                                           key + "'");
            }
        }
        PhysicalParams p;
        p.gamma = kTwoPi * 1.0e6 * require_number(j, "gamma_mhz");
        p.sigma0 = require_number(j, "sigma0_m2");
        p.w0 = 1.0e-6 * require_number(j, "w0_um");
        p.s0 = require_number(j, "s0");
        p.delta = kTwoPi * 1.0e6 * require_number(j, "delta_mhz");
        p.n_photons = require_number(j, "n_photons");
        p.n_atoms = require_number(j, "n_atoms");
        try {
            p.validate();
        } catch (const std::invalid_argument& err) {
            throw ConfigError("physical", err.what());
        }
        cfg.physical = p;
    }

    if (j.contains("kappa")) cfg.kappa = require_number(j, "kappa");
    if (j.contains("eps_l")) cfg.eps_l = require_number(j, "eps_l");
    if (j.contains("eps_a")) cfg.eps_a = require_number(j, "eps_a");
    if (j.contains("eps_l_prime")) {
        cfg.eps_l_prime = require_number(j, "eps_l_prime");
    }
    if (j.contains("x0")) cfg.x0 = require_number(j, "x0");
    if (j.contains("clamp")) cfg.clamp = j.at("clamp").get<bool>();
    if (j.contains("cycles")) cfg.cycles = j.at("cycles").get<int>();
    if (j.contains("gain")) {
        cfg.gain_grid = {require_number(j, "gain")};
    }
    if (j.contains("gain_grid")) {
        if (!j.at("gain_grid").is_array()) {
            throw ConfigError("gain_grid", "gain_grid must be an array");
        }
        cfg.gain_grid = j.at("gain_grid").get<std::vector<double>>();
        if (cfg.gain_grid.empty()) {
            throw ConfigError("gain_grid", "gain_grid must be nonempty");
        }
    }
    if (j.contains("gain_scale")) {
        cfg.gain_scale = require_number(j, "gain_scale");
    }
    if (j.contains("n_shots")) cfg.n_shots = j.at("n_shots").get<long long>();
    if (j.contains("n_resamples")) {
        cfg.n_resamples = j.at("n_resamples").get<int>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_spins")) cfg.n_spins = j.at("n_spins").get<int>();
    if (j.contains("out")) cfg.output_path = j.at("out").get<std::string>();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string canonical_json(const RunConfig& cfg) {
    json j;
    j["mode"] = to_string(cfg.mode);
    if (cfg.mode == RunMode::kCalibrate) {
        const PhysicalParams& p = *cfg.physical;
        j["physical"] = {p.gamma, p.sigma0, p.w0,    p.s0,
                         p.delta, p.n_photons, p.n_atoms};
        return j.dump();
    }
    if (cfg.mode == RunMode::kExact) {
        j["n_spins"] = cfg.n_spins;
        j["gain_grid"] = cfg.resolved_gain_grid();
        return j.dump();
    }
    const ChannelParams c = cfg.channel();
    j["channel"] = {c.kappa, c.eps_l, c.eps_a, c.eps_l_prime};
    const int run_cycles = cfg.mode == RunMode::kMulticycle ? cfg.cycles : 1;
    const FeedbackConfig fb = cfg.feedback_for(0.0, run_cycles);
    j["x0"] = fb.x0;
    j["clamp"] = fb.clamp_enabled;
    j["cycles"] = run_cycles;
    j["gain_grid"] = cfg.resolved_gain_grid();
    j["n_shots"] = cfg.n_shots;
    j["n_resamples"] = cfg.n_resamples;
    j["seed"] = cfg.seed;
    return j.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = canonical_json(cfg);
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (const unsigned char byte : text) {
        hash ^= byte;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

std::vector<double> default_gain_grid(const ChannelParams& c) {
    const double g_opt = optimal_gain(c);
    FeedbackConfig fb;
    fb.cycles = 1;
    const auto v1 = [&](double g) {
        fb.gain = g;
        return analytic_moments(c, fb).variance(1);
    };
    const double den = v1(0.0) - 0.5;
    if (den <= 0.0) {
        throw NoAtomSignal("channel has no atom-noise excess to sweep");
    }
    const double xi_min = (v1(g_opt) - 0.5) / den;
    const double curvature = (v1(g_opt + 1.0) - 0.5) / den - xi_min;
    const double half_width = std::sqrt((1.3 - xi_min) / curvature);

    std::vector<double> grid;
    grid.reserve(17);
    for (int i = 0; i < 17; ++i) {
        grid.push_back(g_opt - half_width +
                       2.0 * half_width * static_cast<double>(i) / 16.0);
    }
    return grid;
}

}  // namespace spinfb
