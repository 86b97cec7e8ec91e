#include "spinfb/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinfb/errors.hpp"
#include "spinfb/estimators.hpp"
#include "spinfb/exact_spin.hpp"
#include "spinfb/rng.hpp"

namespace spinfb {

namespace {

// Seed streams per run: 0 = reference ensemble, 1+i = gain-grid point i,
// 1e6+i = bootstrap of point i.
constexpr std::uint64_t kBootstrapStreamBase = 1000000;

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_header(std::ostream& out, const RunConfig& cfg,
                  const std::string& columns) {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    out << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
    out << columns << "\n";
}

void write_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            out << ",";
        }
        out << format_number(values[i]);
    }
    out << "\n";
}

}  // namespace

void cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
    const PhysicalParams& p = *cfg.physical;
    const ChannelParams c = channel_from_physical(p);
    nlohmann::json report;
    report["kappa"] = std::abs(kappa(p));
    report["eps_a"] = eps_a(p);
    report["s"] = saturation(p);
    report["ratio"] = std::abs(coupling_ratio(p));
    report["theta_rad"] = std::abs(faraday_angle(p));
    report["v_shot"] = polarimeter_variance(p, false);
    report["v_atoms"] = polarimeter_variance(p, true);
    report["kappa2_eps_a"] = unpolarized_snr_bound(c);
    out << report.dump(2) << "\n";
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const ChannelParams c = cfg.channel();
    const std::vector<double> grid = cfg.resolved_gain_grid();
    const auto n_shots = static_cast<Eigen::Index>(cfg.n_shots);

    const ShotEnsemble ref =
        run_sequence(c, cfg.feedback_for(0.0, 1), n_shots,
                     rng::derive_seed(cfg.seed, 0));

    write_header(out, cfg,
                 "gain,two_delta_plus_mc,two_delta_minus_mc,"
                 "two_delta_plus_th,two_delta_minus_th,"
                 "xi_unc,xi_unc_err_lo,xi_unc_err_hi");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid[i];
        const FeedbackConfig fb = cfg.feedback_for(g, 1);
        const ShotEnsemble ens =
            run_sequence(c, fb, n_shots, rng::derive_seed(cfg.seed, 1 + i));
        const DeltaPm mc = delta_pm(ens);

        FeedbackConfig linear = fb;
        linear.clamp_enabled = false;
        const SequenceMoments th = analytic_moments(c, linear);

        const EstimateWithError xi =
            xi_unc(ens, ref, 0.5, 0.5, cfg.n_resamples,
                   rng::derive_seed(cfg.seed, kBootstrapStreamBase + i));
        write_row(out, {g, 2.0 * mc.plus, 2.0 * mc.minus,
                        2.0 * th.delta_plus_sq, 2.0 * th.delta_minus_sq,
                        xi.value, xi.sigma_low, xi.sigma_high});
    }
}

void cmd_multicycle(const RunConfig& cfg, std::ostream& out) {
    const ChannelParams c = cfg.channel();
    const std::vector<double> grid = cfg.resolved_gain_grid();
    const auto n_shots = static_cast<Eigen::Index>(cfg.n_shots);

    std::string columns = "gain";
    for (int cycle = 1; cycle <= cfg.cycles; ++cycle) {
        const std::string name = "xi_" + std::to_string(cycle);
        columns += "," + name + "," + name + "_err_lo," + name + "_err_hi";
    }
    write_header(out, cfg, columns);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const FeedbackConfig fb = cfg.feedback_for(grid[i], cfg.cycles);
        const ShotEnsemble ens =
            run_sequence(c, fb, n_shots, rng::derive_seed(cfg.seed, 1 + i));
        std::vector<double> row{grid[i]};
        for (int cycle = 1; cycle <= cfg.cycles; ++cycle) {
            const EstimateWithError xi = xi_multi(
                ens, cycle, NoiseFloor::kShotNoise, cfg.n_resamples,
                rng::derive_seed(cfg.seed, kBootstrapStreamBase +
                                               grid.size() * cycle + i));
            row.insert(row.end(), {xi.value, xi.sigma_low, xi.sigma_high});
        }
        write_row(out, row);
    }
}

void cmd_exact(const RunConfig& cfg, std::ostream& out) {
    const MixedSpinModel model(cfg.n_spins);
    const std::vector<GainScanRow> rows =
        gain_scan(model, cfg.resolved_gain_grid());
    write_header(out, cfg, "gain,xi_unp,delta_plus,delta_minus");
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        write_row(out, {rows[i].gain, rows[i].xi_unp, rows[i].delta_plus_sq,
                        rows[i].delta_minus_sq});
        if (rows[i].xi_unp < rows[argmin].xi_unp) {
            argmin = i;
        }
    }
    out << "# argmin_gain=" << format_number(rows[argmin].gain)
        << " xi_min=" << format_number(rows[argmin].xi_unp) << "\n";
}

void run_command(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    switch (cfg.mode) {
        case RunMode::kCalibrate: cmd_calibrate(cfg, out); break;
        case RunMode::kSweep: cmd_sweep(cfg, out); break;
        case RunMode::kMulticycle: cmd_multicycle(cfg, out); break;
        case RunMode::kExact: cmd_exact(cfg, out); break;
    }
}

}  // namespace spinfb
