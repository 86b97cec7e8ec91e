#pragma once

#include <cstdint>
#include <functional>

#include "spinfb/gaussian_feedback.hpp"

namespace spinfb {

/// Point estimate with asymmetric +/-1 sigma statistical bounds.
struct EstimateWithError {
    double value = 0.0;
    double sigma_low = 0.0;
    double sigma_high = 0.0;
    Eigen::Index n_samples = 0;
};

/// 10*log10 of a variance ratio.
double to_decibels(double ratio);

/// Maps value and interval endpoints through 10*log10.
EstimateWithError to_decibels(const EstimateWithError& e);

/// Unbiased sample moments of two outcome columns.
struct SecondMoments {
    double var_first = 0.0;
    double var_second = 0.0;
    double covariance = 0.0;
    Eigen::Index n = 0;
};

SecondMoments column_moments(const ShotEnsemble& ens, int i, int j);

struct DeltaPm {
    double plus = 0.0;   ///< V(x_i + x_j)/2
    double minus = 0.0;  ///< V(x_i - x_j)/2
};

DeltaPm delta_pm(const SecondMoments& m);
DeltaPm delta_pm(const ShotEnsemble& ens, int i = 0, int j = 1);

struct ConditionalVariance {
    double v_cond = 0.0;  ///< min over g_c of V(x_j + g_c x_i)
    double gain = 0.0;    ///< minimizer, -cov/V(x_i)
};

ConditionalVariance conditional_variance(const SecondMoments& m);
ConditionalVariance conditional_variance(const ShotEnsemble& ens, int i = 0,
                                         int j = 1);

/// xi^2_cond = (V_cond - shot) / (V(x_j) - shot).
double xi_cond_value(const SecondMoments& m, double shot_var_second);
EstimateWithError xi_cond(const ShotEnsemble& ens, double shot_var_second,
                          int n_resamples = 1000, std::uint64_t seed = 0);

/// xi^2_unc = (V_fb - shot_fb) / (V_ref - shot_ref), from the second
/// columns of the feedback and reference (g = 0) ensembles.
double xi_unc_value(double v_fb, double shot_var_fb, double v_ref,
                    double shot_var_ref);
EstimateWithError xi_unc(const ShotEnsemble& fb, const ShotEnsemble& ref,
                         double shot_var_fb, double shot_var_ref,
                         int n_resamples = 1000, std::uint64_t seed = 0);

/// Noise floor convention for the multi-cycle parameter.
enum class NoiseFloor {
    kShotNoise,             ///< 1/2
    kShotPlusUncorrelated,  ///< 1/2 + eps_l_prime/2 of the generating channel
};

/// xi^2_i = (V(X^(i)) - floor) / (V(X^(0)) - floor).
double xi_multi_value(const ShotEnsemble& ens, int cycle,
                      NoiseFloor floor = NoiseFloor::kShotNoise);
EstimateWithError xi_multi(const ShotEnsemble& ens, int cycle,
                           NoiseFloor floor = NoiseFloor::kShotNoise,
                           int n_resamples = 1000, std::uint64_t seed = 0);

/// Percentile bootstrap over shots; resample indices are Philox-indexed by
/// (seed; resample, position) so intervals are reproducible.
EstimateWithError bootstrap(
    const ShotEnsemble& ens,
    const std::function<double(const ShotEnsemble&)>& statistic,
    int n_resamples, std::uint64_t seed);

struct SqueezingCheck {
    bool satisfied = false;
    double margin = 0.0;  ///< coherence - xi_sq
};

/// Squeezing criterion against the scattering-reduced coherence:
/// satisfied iff xi_sq < coherence (strict).
SqueezingCheck kitagawa_ueda_check(double xi_sq, double coherence);

}  // namespace spinfb
