#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinfb/coupling.hpp"
#include "spinfb/gaussian_feedback.hpp"

namespace spinfb {

enum class RunMode { kCalibrate, kSweep, kMulticycle, kExact };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& name);

/// Parsed run description. Config files are flat JSON; frequencies arrive
/// in MHz (gamma_mhz, delta_mhz) and are converted to rad/s at parse time.
/// Channel constants may come from the physical parameters or be supplied
/// directly; direct values win on conflict.
struct RunConfig {
    RunMode mode = RunMode::kCalibrate;

    std::optional<PhysicalParams> physical;
    std::optional<double> kappa;
    std::optional<double> eps_l;
    std::optional<double> eps_a;
    std::optional<double> eps_l_prime;

    std::optional<double> x0;     ///< default: 3 sqrt(V(X')) at g = 0
    std::optional<bool> clamp;    ///< default: enabled iff cycles >= 2
    int cycles = 1;
    std::vector<double> gain_grid;  ///< pre-scale; empty -> default grid
    double gain_scale = 1.0;

    long long n_shots = 10000;
    int n_resamples = 1000;
    std::uint64_t seed = 1;
    int n_spins = 100;
    std::string output_path;  ///< empty -> stdout

    /// Resolved channel constants; throws ConfigError when underdetermined.
    ChannelParams channel() const;

    /// Feedback settings for one model gain, with x0/clamp defaults filled.
    FeedbackConfig feedback_for(double gain, int run_cycles) const;

    /// Model-unit gain grid (gain_scale applied), default grid if empty.
    std::vector<double> resolved_gain_grid() const;

    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Canonical serialization of the fields that determine the output, and its
/// FNV-1a 64-bit hash (printed into every CSV header).
std::string canonical_json(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

/// 17 points centered on the optimal gain, spanning the region where the
/// linear-model xi_unc stays below 1.3.
std::vector<double> default_gain_grid(const ChannelParams& c);

}  // namespace spinfb
