#pragma once

#include <iosfwd>

#include "spinfb/run_config.hpp"

namespace spinfb {

/// Calibration report: couplings, Faraday angle and polarimeter variance
/// predictions as a JSON object (kappa, theta and the ratio as magnitudes).
void cmd_calibrate(const RunConfig& cfg, std::ostream& out);

/// Single-cycle gain sweep: Monte Carlo 2*delta_pm in shot-noise units, the
/// linear-model curves, and xi_unc with bootstrap bounds against an
/// independent g = 0 reference run.
void cmd_sweep(const RunConfig& cfg, std::ostream& out);

/// Multi-cycle sweep: xi_i per cycle with bootstrap bounds, clamp honored.
void cmd_multicycle(const RunConfig& cfg, std::ostream& out);

/// Exact mixed-state scan: xi_unp and delta_pm per gain plus an argmin
/// summary line.
void cmd_exact(const RunConfig& cfg, std::ostream& out);

/// Validates and dispatches on cfg.mode.
void run_command(const RunConfig& cfg, std::ostream& out);

}  // namespace spinfb
