#include "spinfb/coupling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinfb {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

}  // namespace

void PhysicalParams::validate() const {
    require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
    require(std::isfinite(sigma0) && sigma0 > 0.0, "sigma0 must be > 0");
    require(std::isfinite(w0) && w0 > 0.0, "w0 must be > 0");
    require(std::isfinite(s0) && s0 >= 0.0, "s0 must be >= 0");
    require(std::isfinite(delta), "delta must be finite");
    require(std::isfinite(n_photons) && n_photons > 0.0,
            "n_photons must be > 0");
    require(std::isfinite(n_atoms) && n_atoms > 0.0, "n_atoms must be > 0");
}

PhysicalParams PhysicalParams::ytterbium_defaults() {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    PhysicalParams p;
    p.gamma = two_pi * 29.0e6;
    p.sigma0 = 7.6e-14;
    p.w0 = 40.0e-6;
    p.s0 = 7.2;
    p.delta = -two_pi * 160.0e6;
    p.n_photons = 1.3e6;
    p.n_atoms = 3.7e5;
    return p;
}

void ChannelParams::validate() const {
    require(std::isfinite(kappa), "kappa must be finite");
    require(eps_l >= 0.0 && eps_l < 1.0, "eps_l must be in [0, 1)");
    require(eps_a >= 0.0 && eps_a < 1.0, "eps_a must be in [0, 1)");
    require(eps_l_prime >= 0.0 && eps_l_prime < 1.0,
            "eps_l_prime must be in [0, 1)");
}

double saturation(const PhysicalParams& p) {
    p.validate();
    const double x = 2.0 * p.delta / p.gamma;
    return p.s0 / (1.0 + x * x);
}

double kappa(const PhysicalParams& p) {
    p.validate();
    const double s = saturation(p);
    const double half_gamma = 0.5 * p.gamma;
    const double lorentz = p.delta / (p.delta * p.delta + half_gamma * half_gamma);
    const double root_sj = std::sqrt(p.light_spin() * p.atom_spin());
    return 2.0 * p.sigma0 * p.gamma * root_sj /
           (3.0 * std::numbers::pi * p.w0 * p.w0 * (1.0 + s)) * lorentz;
}

double eps_a(const PhysicalParams& p) {
    p.validate();
    const double s = saturation(p);
    const double half_gamma = 0.5 * p.gamma;
    const double lorentz =
        half_gamma / (p.delta * p.delta + half_gamma * half_gamma);
    return p.sigma0 * p.gamma * p.light_spin() /
           (std::numbers::pi * p.w0 * p.w0 * (1.0 + s)) * lorentz;
}

double coupling_ratio(const PhysicalParams& p) {
    p.validate();
    return (2.0 / 3.0) * std::sqrt(p.atom_spin() / p.light_spin()) * p.delta /
           (0.5 * p.gamma);
}

double faraday_rotation_per_spin(const PhysicalParams& p) {
    return kappa(p) / std::sqrt(p.light_spin() * p.atom_spin());
}

double faraday_angle(const PhysicalParams& p) {
    return faraday_rotation_per_spin(p) * p.n_atoms / 4.0;
}

double polarimeter_variance(const PhysicalParams& p, bool atoms_present) {
    p.validate();
    const double shot = p.n_photons / 4.0;
    if (!atoms_present) {
        return shot;
    }
    const double signal = faraday_rotation_per_spin(p) * p.n_photons / 2.0;
    return shot + signal * signal * p.n_atoms / 4.0;
}

double unpolarized_snr_bound(const ChannelParams& c) {
    return c.kappa * c.kappa * c.eps_a;
}

ChannelParams channel_from_physical(const PhysicalParams& p, double eps_l,
                                    double eps_l_prime) {
    ChannelParams c;
    c.kappa = kappa(p);
    c.eps_a = eps_a(p);
    c.eps_l = eps_l;
    c.eps_l_prime = eps_l_prime;
    c.validate();
    return c;
}

}  // namespace spinfb
