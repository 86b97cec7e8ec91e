#pragma once

namespace spinfb {

/// Probe/atom parameters of the dispersive Faraday interface.
/// Angular frequencies are stored in rad/s (config files take MHz and
/// multiply by 2*pi at parse time).
struct PhysicalParams {
    double gamma = 0.0;      ///< natural linewidth Gamma (rad/s)
    double sigma0 = 0.0;     ///< resonant scattering cross section (m^2)
    double w0 = 0.0;         ///< probe beam waist (m)
    double s0 = 0.0;         ///< resonant saturation parameter
    double delta = 0.0;      ///< probe detuning Delta (rad/s, signed)
    double n_photons = 0.0;  ///< mean photons per probe pulse N_L
    double n_atoms = 0.0;    ///< effective atom number N_A

    double light_spin() const { return n_photons / 2.0; }  ///< S = N_L/2
    double atom_spin() const { return n_atoms / 2.0; }     ///< J = N_A/2

    /// Throws std::invalid_argument on non-physical values.
    void validate() const;

    /// 171Yb 1S0 <-> 1P1 probe at -2*pi*160 MHz detuning, N_L = 1.3e6,
    /// N_A = 3.7e5.
    static PhysicalParams ytterbium_defaults();
};

/// The four dimensionless channel constants of the lossy QND map.
struct ChannelParams {
    double kappa = 0.0;        ///< coupling, signed (sign of the detuning)
    double eps_l = 0.0;        ///< light damping per pulse
    double eps_a = 0.0;        ///< atomic depolarization per pulse
    double eps_l_prime = 0.0;  ///< uncorrelated readout-noise admixture

    void validate() const;
};

/// Off-resonant saturation s = s0 / (1 + (2*Delta/Gamma)^2).
double saturation(const PhysicalParams& p);

/// Dimensionless coupling kappa; odd in the detuning.
double kappa(const PhysicalParams& p);

/// Atomic damping per pulse; even in the detuning, >= 0.
double eps_a(const PhysicalParams& p);

/// kappa/eps_a = (2/3) sqrt(J/S) * Delta / (Gamma/2).
double coupling_ratio(const PhysicalParams& p);

/// Faraday rotation per unit spin, chi_f = kappa / sqrt(S J).
double faraday_rotation_per_spin(const PhysicalParams& p);

/// Rotation angle with the sample polarized along the probe,
/// theta = chi_f * N_A / 4.
double faraday_angle(const PhysicalParams& p);

/// Polarimeter variance in photon-number units: N_L/4 shot noise, plus
/// (chi_f N_L/2)^2 N_A/4 of atomic projection noise when atoms sit
/// transverse to the probe.
double polarimeter_variance(const PhysicalParams& p, bool atoms_present);

/// Upper bound kappa^2 * eps_a on the unpolarized-spin signal-to-shot-noise
/// ratio.
double unpolarized_snr_bound(const ChannelParams& c);

/// Derive the channel from physical parameters. eps_l has no closed form
/// here and is a direct input (default 0.042), as is eps_l_prime.
ChannelParams channel_from_physical(const PhysicalParams& p,
                                    double eps_l = 0.042,
                                    double eps_l_prime = 0.0);

}  // namespace spinfb
