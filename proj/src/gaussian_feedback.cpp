#include "spinfb/gaussian_feedback.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinfb/errors.hpp"
#include "spinfb/rng.hpp"

namespace spinfb {

namespace {

// Philox counter layout: hi = shot index, lo = 4*probe + draw with
// draws (0: X_L0, 1: E_L, 2: E_A); the initial atom draw uses lo = ~0.
constexpr std::uint64_t kInitDrawIndex =
    std::numeric_limits<std::uint64_t>::max();

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

void FeedbackConfig::validate() const {
    if (cycles < 1) {
        throw std::invalid_argument("cycles must be >= 1");
    }
    if (!std::isfinite(gain) || !std::isfinite(x0)) {
        throw std::invalid_argument("gain and x0 must be finite");
    }
}

GaussianState::GaussianState() : mean_(1), cov_(1, 1) {
    mean_(0) = 0.0;
    cov_(0, 0) = 0.5;
}

int GaussianState::qnd_step(const ChannelParams& c) {
    const auto d = mean_.size();
    const double a = std::sqrt(1.0 - c.eps_a);
    const double b = std::sqrt(1.0 - c.eps_l) * c.kappa;

    // Rows of the affine map: P_A' = a P_A; outcomes unchanged;
    // X_new = b P_A (+ fresh noise).
    Eigen::MatrixXd map = Eigen::MatrixXd::Identity(d + 1, d);
    map(0, 0) = a;
    map(d, 0) = b;

    Eigen::VectorXd mean = map * mean_;
    Eigen::MatrixXd cov = map * cov_ * map.transpose();
    cov(0, 0) += c.eps_a / 2.0;
    cov(d, d) += (1.0 - c.eps_l) / 2.0 + c.eps_l_prime / 2.0;

    mean_ = std::move(mean);
    cov_ = std::move(cov);
    return static_cast<int>(d) - 1;
}

void GaussianState::feedback_step(const FeedbackConfig& cfg,
                                  const ChannelParams& c) {
    if (cfg.clamp_enabled) {
        throw ClampNotGaussian(
            "clamped feedback is not a linear map; use sampling mode");
    }
    if (n_outcomes() == 0) {
        throw std::logic_error("feedback_step before any qnd_step");
    }
    const auto d = mean_.size();
    const double f = cfg.gain * (1.0 - c.eps_a);

    Eigen::MatrixXd map = Eigen::MatrixXd::Identity(d, d);
    map(0, d - 1) = f;
    mean_ = map * mean_;
    mean_(0) -= f * cfg.x0;
    cov_ = map * cov_ * map.transpose();
}

double qnd_step(ShotState& state, const ChannelParams& c, double noise_xl0,
                double noise_el, double noise_ea) {
    const double outcome = std::sqrt(1.0 - c.eps_l) *
                               (noise_xl0 + c.kappa * state.atom) +
                           std::sqrt(c.eps_l_prime) * noise_el;
    state.atom = std::sqrt(1.0 - c.eps_a) * state.atom +
                 std::sqrt(c.eps_a) * noise_ea;
    return outcome;
}

void feedback_step(ShotState& state, double outcome, const FeedbackConfig& cfg,
                   const ChannelParams& c) {
    if (cfg.clamp_enabled && outcome > cfg.x0) {
        return;
    }
    state.atom += cfg.gain * (1.0 - c.eps_a) * (outcome - cfg.x0);
}

ShotEnsemble run_sequence(const ChannelParams& c, const FeedbackConfig& cfg,
                          Eigen::Index n_shots, std::uint64_t seed) {
    c.validate();
    cfg.validate();
    if (n_shots < 1) {
        throw std::invalid_argument("n_shots must be >= 1");
    }

    const int probes = cfg.cycles + 1;
    ShotEnsemble ens;
    ens.outcomes.resize(n_shots, probes);
    ens.seed = seed;
    ens.channel = c;
    ens.feedback = cfg;

    const rng::Philox gen(seed);
    for (Eigen::Index shot = 0; shot < n_shots; ++shot) {
        const auto hi = static_cast<std::uint64_t>(shot);
        ShotState state;
        state.atom = kInvSqrt2 * gen.normal(hi, kInitDrawIndex);
        for (int probe = 0; probe < probes; ++probe) {
            const std::uint64_t base = 4ull * static_cast<std::uint64_t>(probe);
            const double xl0 = kInvSqrt2 * gen.normal(hi, base + 0);
            const double el = kInvSqrt2 * gen.normal(hi, base + 1);
            const double ea = kInvSqrt2 * gen.normal(hi, base + 2);
            const double outcome = qnd_step(state, c, xl0, el, ea);
            ens.outcomes(shot, probe) = outcome;
            if (probe < cfg.cycles) {
                feedback_step(state, outcome, cfg, c);
            }
        }
    }
    return ens;
}

SequenceMoments analytic_moments(const ChannelParams& c,
                                 const FeedbackConfig& cfg) {
    c.validate();
    cfg.validate();
    if (cfg.clamp_enabled) {
        throw ClampNotGaussian(
            "analytic moments require the clamp-free linear model");
    }

    GaussianState state;
    for (int probe = 0; probe <= cfg.cycles; ++probe) {
        state.qnd_step(c);
        if (probe < cfg.cycles) {
            state.feedback_step(cfg, c);
        }
    }

    const int n = state.n_outcomes();
    SequenceMoments m;
    m.mean = state.mean().tail(n);
    m.covariance = state.covariance().bottomRightCorner(n, n);
    const double v0 = m.covariance(0, 0);
    const double v1 = m.covariance(1, 1);
    const double c01 = m.covariance(0, 1);
    m.delta_plus_sq = (v0 + v1 + 2.0 * c01) / 2.0;
    m.delta_minus_sq = (v0 + v1 - 2.0 * c01) / 2.0;
    return m;
}

double delta_minus_analytic(double kappa, double eps_a, double eps_l,
                            double eps_l_prime) {
    return (1.0 - eps_l) / 2.0 *
               (1.0 + kappa * kappa * (1.0 - std::sqrt(1.0 - eps_a))) +
           eps_l_prime / 2.0;
}

UncorrelatedNoiseFit fit_eps_l_prime(double measured_delta_minus,
                                     double measured_shot,
                                     const ChannelParams& c) {
    if (!(measured_delta_minus >= 0.0)) {
        throw std::invalid_argument("measured_delta_minus must be >= 0");
    }
    if (!(measured_shot > 0.0)) {
        throw std::invalid_argument("measured_shot must be > 0");
    }
    // delta_minus_analytic is base + eps_l_prime/2 with the ratio measured
    // in units of the shot noise 1/2.
    const double base = delta_minus_analytic(c.kappa, c.eps_a, c.eps_l, 0.0);
    const double target = measured_delta_minus / measured_shot / 2.0;
    UncorrelatedNoiseFit fit;
    fit.eps_l_prime = 2.0 * (target - base);
    if (fit.eps_l_prime < 0.0) {
        fit.eps_l_prime = 0.0;
        fit.clamped_at_zero = true;
    }
    return fit;
}

double optimal_gain(const ChannelParams& c) {
    c.validate();
    if (c.kappa == 0.0) {
        throw DegenerateChannel("kappa = 0: outcome variance is gain-free");
    }
    // V(P_A^(1))(g) is quadratic with linear coefficient
    // 2 (1-eps_a)^{3/2} cov(P_A, X^(0)) and curvature (1-eps_a)^2 V(X^(0)).
    const double v_x0 = (1.0 - c.eps_l) * (1.0 + c.kappa * c.kappa) / 2.0 +
                        c.eps_l_prime / 2.0;
    return -c.kappa * std::sqrt(1.0 - c.eps_l) /
           (2.0 * std::sqrt(1.0 - c.eps_a) * v_x0);
}

}  // namespace spinfb
