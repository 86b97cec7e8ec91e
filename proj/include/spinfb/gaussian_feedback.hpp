#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "spinfb/coupling.hpp"

namespace spinfb {

/// Feedback settings for the probe/feedback sequence.
///
/// `gain` multiplies the latest outcome as g*(1-eps_a)*(X - x0); the clamp
/// restricts feedback to outcomes <= x0 (the controller can only rotate one
/// way). Single-cycle runs default to clamp off, multi-cycle runs to clamp
/// on, mirroring the two forms of the feedback map.
struct FeedbackConfig {
    double gain = 0.0;
    double x0 = 0.0;
    bool clamp_enabled = false;
    int cycles = 1;

    void validate() const;
};

/// Joint Gaussian state over (P_A, X_L^(0), ..., X_L^(k)).
///
/// Starts from the coherent preparation <P_A> = 0, V(P_A) = 1/2. Each
/// qnd_step appends one outcome variable and integrates the fresh noise
/// modes (probe shot noise, uncorrelated readout noise, depolarization)
/// into the covariance, so the state stays exact and finite-dimensional.
class GaussianState {
  public:
    GaussianState();

    int n_outcomes() const { return static_cast<int>(mean_.size()) - 1; }

    double atom_mean() const { return mean_(0); }
    double atom_variance() const { return cov_(0, 0); }
    double outcome_mean(int i) const { return mean_(1 + i); }
    double outcome_variance(int i) const { return cov_(1 + i, 1 + i); }
    double outcome_covariance(int i, int j) const { return cov_(1 + i, 1 + j); }
    double atom_outcome_covariance(int i) const { return cov_(0, 1 + i); }

    /// Full mean/covariance, P_A first then outcomes in probe order.
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& covariance() const { return cov_; }

    /// Probe pass: emits a new outcome variable and applies the atomic
    /// damping. Returns the outcome index.
    int qnd_step(const ChannelParams& c);

    /// Shifts P_A by gain*(1-eps_a)*(X_last - x0). Throws ClampNotGaussian
    /// when cfg.clamp_enabled: the clamp is not a linear map.
    void feedback_step(const FeedbackConfig& cfg, const ChannelParams& c);

  private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// One sampled trajectory's atomic quadrature.
struct ShotState {
    double atom = 0.0;
};

/// Sampling-mode probe pass. The three noise arguments are independent
/// normals of variance 1/2 (probe shot noise X_L0, uncorrelated readout
/// noise E_L, depolarization E_A). Returns the polarimeter outcome and
/// applies the atomic damping in place.
double qnd_step(ShotState& state, const ChannelParams& c, double noise_xl0,
                double noise_el, double noise_ea);

/// Sampling-mode feedback; honors the clamp.
void feedback_step(ShotState& state, double outcome, const FeedbackConfig& cfg,
                   const ChannelParams& c);

/// Outcome records for repeated runs of the sequence.
struct ShotEnsemble {
    Eigen::MatrixXd outcomes;  ///< n_shots x (cycles+1)
    std::uint64_t seed = 0;
    ChannelParams channel;
    FeedbackConfig feedback;

    Eigen::Index n_shots() const { return outcomes.rows(); }
    Eigen::Index n_probes() const { return outcomes.cols(); }
};

/// Runs `cycles` (probe, feedback) pairs plus a final readout probe per
/// shot. Noise is Philox-indexed by (seed; shot, probe, draw), so the
/// ensemble is bit-reproducible regardless of evaluation order.
ShotEnsemble run_sequence(const ChannelParams& c, const FeedbackConfig& cfg,
                          Eigen::Index n_shots, std::uint64_t seed);

/// Exact second moments of the outcome vector for the clamp-free model.
struct SequenceMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double delta_plus_sq = 0.0;   ///< V(X^(0)+X^(1))/2
    double delta_minus_sq = 0.0;  ///< V(X^(0)-X^(1))/2

    double variance(int i) const { return covariance(i, i); }
};

/// Linear covariance propagation of the full sequence (clamp must be
/// disabled; throws ClampNotGaussian otherwise).
SequenceMoments analytic_moments(const ChannelParams& c,
                                 const FeedbackConfig& cfg);

/// Closed form for the no-feedback difference variance:
/// (1-eps_l)/2 * (1 + kappa^2 (1 - sqrt(1-eps_a))) + eps_l_prime/2.
double delta_minus_analytic(double kappa, double eps_a, double eps_l,
                            double eps_l_prime);

struct UncorrelatedNoiseFit {
    double eps_l_prime = 0.0;
    bool clamped_at_zero = false;  ///< measurement below the zero-noise model
};

/// Solves delta_minus_analytic(...) = measured_delta_minus/measured_shot/2
/// for eps_l_prime. The measured variances are in any common units; the
/// shot variance sets the scale of 1/2.
UncorrelatedNoiseFit fit_eps_l_prime(double measured_delta_minus,
                                     double measured_shot,
                                     const ChannelParams& c);

/// Gain minimizing V(X_L^(1)); at this gain cov(X^(0), X^(1)) = 0 in the
/// linear model, so delta_plus = delta_minus. Throws DegenerateChannel for
/// kappa = 0.
double optimal_gain(const ChannelParams& c);

}  // namespace spinfb
