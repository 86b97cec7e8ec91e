#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinfb/commands.hpp"
#include "spinfb/errors.hpp"

namespace {

int fail(const std::string& type, const std::string& message,
         const std::string& field = "") {
    nlohmann::json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    if (!field.empty()) {
        err["error"]["field"] = field;
    }
    std::cerr << err.dump() << "\n";
    return type == "ConfigError" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Collective-spin QND measurement and feedback simulator.\n"
        "Runs calibration, Gaussian-model gain sweeps and exact mixed-state "
        "scans from a JSON config."};

    std::string config_path;
    std::string mode_flag;
    std::string out_flag;
    long long shots_flag = -1;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;

    app.add_option("config", config_path, "JSON config file")->required();
    app.add_option("--mode", mode_flag,
                   "calibrate | sweep | multicycle | exact");
    app.add_option("--seed", seed_flag, "RNG seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--shots", shots_flag, "shots per gain point");
    app.add_option("--out", out_flag, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        spinfb::RunConfig cfg = spinfb::load_run_config(config_path);
        if (!mode_flag.empty()) {
            cfg.mode = spinfb::parse_run_mode(mode_flag);
        }
        if (seed_given) {
            cfg.seed = seed_flag;
        }
        if (shots_flag >= 0) {
            cfg.n_shots = shots_flag;
        }
        if (!out_flag.empty()) {
            cfg.output_path = out_flag;
        }

        if (cfg.output_path.empty()) {
            spinfb::run_command(cfg, std::cout);
        } else {
            std::ofstream out(cfg.output_path);
            if (!out) {
                return fail("IoError",
                            "cannot open output file '" + cfg.output_path +
                                "'");
            }
            spinfb::run_command(cfg, out);
        }
        return 0;
    } catch (const spinfb::ConfigError& err) {
        return fail("ConfigError", err.what(), err.field);
    } catch (const std::exception& err) {
        return fail("RuntimeError", err.what());
    }
}
