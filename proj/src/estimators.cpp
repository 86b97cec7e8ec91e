#include "spinfb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinfb/errors.hpp"
#include "spinfb/rng.hpp"

namespace spinfb {

namespace {

// +/- one sigma of the standard normal.
constexpr double kLowQuantile = 0.15865525393145705;
constexpr double kHighQuantile = 0.84134474606854295;

double percentile(std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

EstimateWithError summarize(double value, std::vector<double> replicas,
                            Eigen::Index n_samples) {
    std::sort(replicas.begin(), replicas.end());
    EstimateWithError e;
    e.value = value;
    e.sigma_low = std::max(0.0, value - percentile(replicas, kLowQuantile));
    e.sigma_high = std::max(0.0, percentile(replicas, kHighQuantile) - value);
    e.n_samples = n_samples;
    return e;
}

ShotEnsemble resample(const ShotEnsemble& ens, const rng::Philox& gen,
                      std::uint64_t stream) {
    const auto n = static_cast<std::uint64_t>(ens.n_shots());
    ShotEnsemble out;
    out.seed = ens.seed;
    out.channel = ens.channel;
    out.feedback = ens.feedback;
    out.outcomes.resize(ens.outcomes.rows(), ens.outcomes.cols());
    for (Eigen::Index pos = 0; pos < ens.n_shots(); ++pos) {
        const auto pick = static_cast<Eigen::Index>(
            gen.integer(stream, static_cast<std::uint64_t>(pos)) % n);
        out.outcomes.row(pos) = ens.outcomes.row(pick);
    }
    return out;
}

void check_resamples(int n_resamples) {
    if (n_resamples < 100) {
        throw std::invalid_argument("n_resamples must be >= 100");
    }
}

}  // namespace

double to_decibels(double ratio) { return 10.0 * std::log10(ratio); }

EstimateWithError to_decibels(const EstimateWithError& e) {
    EstimateWithError out;
    out.value = to_decibels(e.value);
    out.sigma_low = out.value - to_decibels(e.value - e.sigma_low);
    out.sigma_high = to_decibels(e.value + e.sigma_high) - out.value;
    out.n_samples = e.n_samples;
    return out;
}

SecondMoments column_moments(const ShotEnsemble& ens, int i, int j) {
    if (i < 0 || j < 0 || i >= ens.n_probes() || j >= ens.n_probes()) {
        throw std::out_of_range("outcome column index out of range");
    }
    const Eigen::Index n = ens.n_shots();
    if (n < 2) {
        throw InsufficientData("need at least 2 shots for sample moments");
    }
    const auto a = ens.outcomes.col(i);
    const auto b = ens.outcomes.col(j);
    const double ma = a.mean();
    const double mb = b.mean();
    const double norm = 1.0 / static_cast<double>(n - 1);
    SecondMoments m;
    m.var_first = (a.array() - ma).square().sum() * norm;
    m.var_second = (b.array() - mb).square().sum() * norm;
    m.covariance = ((a.array() - ma) * (b.array() - mb)).sum() * norm;
    m.n = n;
    return m;
}

DeltaPm delta_pm(const SecondMoments& m) {
    DeltaPm d;
    d.plus = (m.var_first + m.var_second + 2.0 * m.covariance) / 2.0;
    d.minus = (m.var_first + m.var_second - 2.0 * m.covariance) / 2.0;
    return d;
}

DeltaPm delta_pm(const ShotEnsemble& ens, int i, int j) {
    return delta_pm(column_moments(ens, i, j));
}

ConditionalVariance conditional_variance(const SecondMoments& m) {
    if (m.var_first == 0.0) {
        throw DegenerateColumn("conditioning column has zero variance");
    }
    ConditionalVariance r;
    r.gain = -m.covariance / m.var_first;
    r.v_cond = m.var_second - m.covariance * m.covariance / m.var_first;
    return r;
}

ConditionalVariance conditional_variance(const ShotEnsemble& ens, int i,
                                         int j) {
    return conditional_variance(column_moments(ens, i, j));
}

double xi_cond_value(const SecondMoments& m, double shot_var_second) {
    const double excess = m.var_second - shot_var_second;
    if (excess <= 0.0) {
        throw NoAtomSignal("second-probe variance does not exceed shot noise");
    }
    return (conditional_variance(m).v_cond - shot_var_second) / excess;
}

EstimateWithError xi_cond(const ShotEnsemble& ens, double shot_var_second,
                          int n_resamples, std::uint64_t seed) {
    return bootstrap(
        ens,
        [shot_var_second](const ShotEnsemble& e) {
            return xi_cond_value(column_moments(e, 0, 1), shot_var_second);
        },
        n_resamples, seed);
}

double xi_unc_value(double v_fb, double shot_var_fb, double v_ref,
                    double shot_var_ref) {
    const double den = v_ref - shot_var_ref;
    if (den <= 0.0) {
        throw NoAtomSignal("reference variance does not exceed shot noise");
    }
    return (v_fb - shot_var_fb) / den;
}

EstimateWithError xi_unc(const ShotEnsemble& fb, const ShotEnsemble& ref,
                         double shot_var_fb, double shot_var_ref,
                         int n_resamples, std::uint64_t seed) {
    check_resamples(n_resamples);
    if (fb.n_probes() < 2 || ref.n_probes() < 2) {
        throw InsufficientData("xi_unc needs two probe columns per ensemble");
    }
    const auto second_var = [](const ShotEnsemble& e) {
        return column_moments(e, 0, 1).var_second;
    };
    const double value = xi_unc_value(second_var(fb), shot_var_fb,
                                      second_var(ref), shot_var_ref);

    const rng::Philox gen(seed);
    std::vector<double> replicas;
    replicas.reserve(static_cast<std::size_t>(n_resamples));
    for (int r = 0; r < n_resamples; ++r) {
        const auto stream = static_cast<std::uint64_t>(r);
        const ShotEnsemble fb_r = resample(fb, gen, 2 * stream);
        const ShotEnsemble ref_r = resample(ref, gen, 2 * stream + 1);
        replicas.push_back(xi_unc_value(second_var(fb_r), shot_var_fb,
                                        second_var(ref_r), shot_var_ref));
    }
    return summarize(value, std::move(replicas), fb.n_shots());
}

namespace {

double noise_floor(const ShotEnsemble& ens, NoiseFloor floor) {
    return floor == NoiseFloor::kShotNoise
               ? 0.5
               : 0.5 + ens.channel.eps_l_prime / 2.0;
}

}  // namespace

double xi_multi_value(const ShotEnsemble& ens, int cycle, NoiseFloor floor) {
    if (cycle < 0 || cycle >= ens.n_probes()) {
        throw std::out_of_range("cycle index out of range");
    }
    const double f = noise_floor(ens, floor);
    const SecondMoments m = column_moments(ens, 0, cycle);
    const double den = m.var_first - f;
    if (den <= 0.0) {
        throw NoAtomSignal("first-probe variance does not exceed the floor");
    }
    return (m.var_second - f) / den;
}

EstimateWithError xi_multi(const ShotEnsemble& ens, int cycle,
                           NoiseFloor floor, int n_resamples,
                           std::uint64_t seed) {
    return bootstrap(
        ens,
        [cycle, floor](const ShotEnsemble& e) {
            return xi_multi_value(e, cycle, floor);
        },
        n_resamples, seed);
}

EstimateWithError bootstrap(
    const ShotEnsemble& ens,
    const std::function<double(const ShotEnsemble&)>& statistic,
    int n_resamples, std::uint64_t seed) {
    check_resamples(n_resamples);
    const double value = statistic(ens);
    const rng::Philox gen(seed);
    std::vector<double> replicas;
    replicas.reserve(static_cast<std::size_t>(n_resamples));
    for (int r = 0; r < n_resamples; ++r) {
        replicas.push_back(
            statistic(resample(ens, gen, static_cast<std::uint64_t>(r))));
    }
    return summarize(value, std::move(replicas), ens.n_shots());
}

SqueezingCheck kitagawa_ueda_check(double xi_sq, double coherence) {
    if (!(coherence > 0.0 && coherence <= 1.0)) {
        throw std::invalid_argument("coherence must be in (0, 1]");
    }
    SqueezingCheck check;
    check.satisfied = xi_sq < coherence;
    check.margin = coherence - xi_sq;
    return check;
}

}  // namespace spinfb
