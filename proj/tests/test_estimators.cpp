#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "spinfb/errors.hpp"
#include "spinfb/estimators.hpp"
#include "spinfb/rng.hpp"

using namespace spinfb;

namespace {

ChannelParams reference_channel(double eps_l_prime = 0.098) {
    ChannelParams c;
    c.kappa = 0.59;
    c.eps_l = 0.042;
    c.eps_a = 0.15;
    c.eps_l_prime = eps_l_prime;
    return c;
}

FeedbackConfig fb(double gain, int cycles = 1) {
    FeedbackConfig cfg;
    cfg.gain = gain;
    cfg.cycles = cycles;
    return cfg;
}

// Two-column ensemble filled from a callback over (shot, column).
ShotEnsemble synthetic(Eigen::Index n, int cols,
                       const std::function<double(Eigen::Index, int)>& fill) {
    ShotEnsemble ens;
    ens.outcomes.resize(n, cols);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (int c = 0; c < cols; ++c) {
            ens.outcomes(s, c) = fill(s, c);
        }
    }
    return ens;
}

ShotEnsemble gaussian_pair(Eigen::Index n, std::uint64_t seed) {
    const rng::Philox gen(seed);
    return synthetic(n, 2, [&](Eigen::Index s, int c) {
        return gen.normal(static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(c));
    });
}

// Reference moments of a correlated two-probe run, in photon-number units:
// V0 = 4.44e5, V1 = 4.43e5, cov = (5.39 - 3.49)e5 / 2, no-atom floor 3.22e5.
SecondMoments correlated_run_moments() {
    SecondMoments m;
    m.var_first = 4.44e5;
    m.var_second = 4.43e5;
    m.covariance = (5.39e5 - 3.49e5) / 2.0;
    m.n = 150000;
    return m;
}

}  // namespace

TEST_CASE("delta_pm") {
    SUBCASE("identical columns") {
        const ShotEnsemble ens = synthetic(1000, 2, [](Eigen::Index s, int) {
            return std::sin(static_cast<double>(s));
        });
        const DeltaPm d = delta_pm(ens);
        const SecondMoments m = column_moments(ens, 0, 1);
        CHECK(d.minus == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(d.plus == doctest::Approx(2.0 * m.var_first).epsilon(1e-12));
    }
    SUBCASE("independent shot-noise columns") {
        const rng::Philox gen(5);
        const ShotEnsemble ens =
            synthetic(200000, 2, [&](Eigen::Index s, int c) {
                return gen.normal(static_cast<std::uint64_t>(s),
                                  static_cast<std::uint64_t>(c)) /
                       std::numbers::sqrt2;
            });
        const DeltaPm d = delta_pm(ens);
        CHECK(d.plus == doctest::Approx(0.5).epsilon(0.02));
        CHECK(d.minus == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("correlated-state variances") {
        const DeltaPm d = delta_pm(correlated_run_moments());
        CHECK(d.plus == doctest::Approx(5.39e5).epsilon(2e-3));
        CHECK(d.minus == doctest::Approx(3.49e5).epsilon(2e-3));
        CHECK(d.plus - d.minus ==
              doctest::Approx(2.0 * correlated_run_moments().covariance).epsilon(1e-12));
    }
    SUBCASE("identity against the sample covariance") {
        const ShotEnsemble ens = gaussian_pair(5000, 77);
        const SecondMoments m = column_moments(ens, 0, 1);
        const DeltaPm d = delta_pm(ens);
        CHECK(d.plus - d.minus ==
              doctest::Approx(2.0 * m.covariance).epsilon(1e-12));
        CHECK(d.plus + d.minus ==
              doctest::Approx(m.var_first + m.var_second).epsilon(1e-12));
    }
    SUBCASE("too few shots") {
        const ShotEnsemble ens = synthetic(1, 2, [](auto, auto) { return 0.0; });
        CHECK_THROWS_AS(delta_pm(ens), InsufficientData);
    }
}

TEST_CASE("conditional_variance") {
    SUBCASE("reference moments") {
        const ConditionalVariance r = conditional_variance(correlated_run_moments());
        CHECK(r.v_cond == doctest::Approx(4.23e5).epsilon(2e-3));
        CHECK(r.gain == doctest::Approx(-0.95e5 / 4.44e5).epsilon(1e-12));
    }
    SUBCASE("uncorrelated columns keep their variance") {
        SecondMoments m;
        m.var_first = 2.0;
        m.var_second = 3.0;
        m.covariance = 0.0;
        const ConditionalVariance r = conditional_variance(m);
        CHECK(r.v_cond == 3.0);
        CHECK(r.gain == 0.0);
    }
    SUBCASE("perfect linear dependence cancels exactly") {
        const rng::Philox gen(6);
        const ShotEnsemble ens = synthetic(4000, 2, [&](Eigen::Index s, int c) {
            const double x = gen.normal(static_cast<std::uint64_t>(s), 0);
            return c == 0 ? x : -2.0 * x;
        });
        const ConditionalVariance r = conditional_variance(ens);
        CHECK(r.gain == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.v_cond ==
              doctest::Approx(0.0).scale(column_moments(ens, 0, 1).var_second));
    }
    SUBCASE("never exceeds the raw variance, matches a grid search") {
        const ShotEnsemble ens = gaussian_pair(3000, 11);
        const SecondMoments m = column_moments(ens, 0, 1);
        const ConditionalVariance r = conditional_variance(ens);
        CHECK(r.v_cond <= m.var_second + 1e-15);

        double best = m.var_second;
        double best_g = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double g = -2.0 + 4.0 * i / 4000.0;
            const Eigen::ArrayXd y =
                ens.outcomes.col(1).array() + g * ens.outcomes.col(0).array();
            const double v =
                (y - y.mean()).square().sum() / static_cast<double>(ens.n_shots() - 1);
            if (v < best) {
                best = v;
                best_g = g;
            }
        }
        CHECK(std::abs(best_g - r.gain) <= 1e-3 + 1e-12);
        CHECK(r.v_cond <= best + 1e-12);
    }
    SUBCASE("degenerate conditioning column") {
        SecondMoments m;
        m.var_first = 0.0;
        m.var_second = 1.0;
        CHECK_THROWS_AS(conditional_variance(m), DegenerateColumn);
    }
}

TEST_CASE("xi_cond") {
    SUBCASE("reference values in linear units and dB") {
        const double xi = xi_cond_value(correlated_run_moments(), 3.22e5);
        CHECK(xi == doctest::Approx(0.83).epsilon(0.02 / 0.83));
        CHECK(to_decibels(xi) == doctest::Approx(-0.80).epsilon(0.12 / 0.80));
    }
    SUBCASE("no correlation means no conditional gain") {
        SecondMoments m;
        m.var_first = 4.0;
        m.var_second = 4.0;
        m.covariance = 0.0;
        CHECK(xi_cond_value(m, 3.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("independent-state control stays at unity") {
        const ChannelParams c = reference_channel();
        const ShotEnsemble a = run_sequence(c, fb(0.0), 10000, 21);
        const ShotEnsemble b = run_sequence(c, fb(0.0), 10000, 22);
        ShotEnsemble control = a;
        control.outcomes.col(1) = b.outcomes.col(0);
        const EstimateWithError xi = xi_cond(control, 0.5, 500, 3);
        CHECK(xi.value == doctest::Approx(1.0).epsilon(0.03));
        CHECK(xi.sigma_low >= 0.0);
        CHECK(xi.sigma_high >= 0.0);
    }
    SUBCASE("no atom signal") {
        SecondMoments m;
        m.var_first = 1.0;
        m.var_second = 1.0;
        CHECK_THROWS_AS(xi_cond_value(m, 1.5), NoAtomSignal);
    }
}

TEST_CASE("xi_unc") {
    const ChannelParams c = reference_channel();

    SUBCASE("feedback off reproduces the reference within error") {
        const ShotEnsemble ens = run_sequence(c, fb(0.0), 20000, 31);
        const ShotEnsemble ref = run_sequence(c, fb(0.0), 20000, 32);
        const EstimateWithError xi = xi_unc(ens, ref, 0.5, 0.5, 400, 4);
        CHECK(std::abs(xi.value - 1.0) <
              4.0 * std::max(xi.sigma_low, xi.sigma_high));
    }
    SUBCASE("overdriven gain amplifies the noise") {
        const double g_opt = optimal_gain(c);
        const ShotEnsemble ens = run_sequence(c, fb(3.0 * g_opt), 20000, 33);
        const ShotEnsemble ref = run_sequence(c, fb(0.0), 20000, 34);
        const EstimateWithError xi = xi_unc(ens, ref, 0.5, 0.5, 400, 5);
        CHECK(xi.value > 1.0);
    }
    SUBCASE("matches the conditional bound at the optimal gain") {
        // linear-model identity, checked on the analytic moments
        const double g_opt = optimal_gain(c);
        const SequenceMoments opt = analytic_moments(c, fb(g_opt));
        const SequenceMoments ref = analytic_moments(c, fb(0.0));
        const double xi_u =
            xi_unc_value(opt.variance(1), 0.5, ref.variance(1), 0.5);
        SecondMoments m;
        m.var_first = ref.variance(0);
        m.var_second = ref.variance(1);
        m.covariance = ref.covariance(0, 1);
        const double xi_c = xi_cond_value(m, 0.5);
        CHECK(xi_u == doctest::Approx(xi_c).epsilon(1e-12));
    }
    SUBCASE("no reference signal") {
        CHECK_THROWS_AS(xi_unc_value(1.0, 0.5, 0.4, 0.5), NoAtomSignal);
    }
}

TEST_CASE("xi_multi") {
    SUBCASE("cycle zero is unity by construction") {
        const ShotEnsemble ens =
            run_sequence(reference_channel(), fb(-0.3, 2), 5000, 41);
        CHECK(xi_multi_value(ens, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no coupling leaves every cycle at unity") {
        ChannelParams c;
        c.eps_l_prime = 0.3;  // excess noise gives a well-posed ratio
        const ShotEnsemble ens = run_sequence(c, fb(-0.3, 2), 100000, 42);
        for (int cycle : {1, 2}) {
            CHECK(xi_multi_value(ens, cycle) ==
                  doctest::Approx(1.0).epsilon(0.05));
        }
    }
    SUBCASE("second cycle improves on the first at the 1-cycle optimum") {
        const ChannelParams c = reference_channel();
        const double g_opt = optimal_gain(c);
        const ShotEnsemble ens = run_sequence(c, fb(g_opt, 2), 40000, 43);
        const double xi1 = xi_multi_value(ens, 1);
        const double xi2 = xi_multi_value(ens, 2);
        CHECK(xi2 < xi1);
    }
    SUBCASE("model-consistent floor option") {
        const ChannelParams c = reference_channel();
        const ShotEnsemble ens = run_sequence(c, fb(0.0), 50000, 44);
        const double verbatim = xi_multi_value(ens, 1, NoiseFloor::kShotNoise);
        const double consistent =
            xi_multi_value(ens, 1, NoiseFloor::kShotPlusUncorrelated);
        CHECK(verbatim != consistent);
        CHECK(consistent == doctest::Approx(1.0).epsilon(0.1));
    }
    SUBCASE("no atom signal") {
        ChannelParams c;  // kappa = 0 and no excess noise at all
        const ShotEnsemble ens = run_sequence(c, fb(0.0), 200, 45);
        CHECK_THROWS_AS(xi_multi_value(ens, 1, NoiseFloor::kShotNoise),
                        NoAtomSignal);
    }
}

TEST_CASE("bootstrap") {
    const auto var0 = [](const ShotEnsemble& e) {
        return column_moments(e, 0, std::min<int>(1, e.n_probes() - 1)).var_first;
    };

    SUBCASE("constant statistic has zero width") {
        const ShotEnsemble ens = synthetic(500, 1, [](auto, auto) { return 3.0; });
        const EstimateWithError e = bootstrap(ens, var0, 200, 6);
        CHECK(e.value == 0.0);
        CHECK(e.sigma_low == 0.0);
        CHECK(e.sigma_high == 0.0);
    }
    SUBCASE("variance of standard normals") {
        const rng::Philox gen(61);
        const Eigen::Index n = 10000;
        const ShotEnsemble ens = synthetic(n, 1, [&](Eigen::Index s, int) {
            return gen.normal(static_cast<std::uint64_t>(s), 0);
        });
        const EstimateWithError e = bootstrap(ens, var0, 1000, 7);
        const double expected_sigma =
            std::sqrt(2.0 / static_cast<double>(n)) * e.value;
        const double width = (e.sigma_low + e.sigma_high) / 2.0;
        CHECK(width == doctest::Approx(expected_sigma).epsilon(0.20));
        CHECK(e.n_samples == n);
    }
    SUBCASE("deterministic given the seed") {
        const ShotEnsemble ens = gaussian_pair(800, 91);
        const EstimateWithError a = bootstrap(ens, var0, 300, 8);
        const EstimateWithError b = bootstrap(ens, var0, 300, 8);
        CHECK(a.value == b.value);
        CHECK(a.sigma_low == b.sigma_low);
        CHECK(a.sigma_high == b.sigma_high);
        const EstimateWithError other = bootstrap(ens, var0, 300, 9);
        CHECK((other.sigma_low != a.sigma_low || other.sigma_high != a.sigma_high));
    }
    SUBCASE("rejects too few resamples") {
        const ShotEnsemble ens = gaussian_pair(100, 92);
        CHECK_THROWS_AS(bootstrap(ens, var0, 99, 1), std::invalid_argument);
    }
}

TEST_CASE("affine invariance") {
    const ShotEnsemble ens = run_sequence(reference_channel(), fb(-0.3), 5000, 51);
    ShotEnsemble scaled = ens;
    const double factor = 1.7e5;
    scaled.outcomes *= std::sqrt(factor);

    const double xi_a = xi_cond_value(column_moments(ens, 0, 1), 0.5);
    const double xi_b =
        xi_cond_value(column_moments(scaled, 0, 1), 0.5 * factor);
    CHECK(xi_a == doctest::Approx(xi_b).epsilon(1e-12));

    const DeltaPm da = delta_pm(ens);
    const DeltaPm db = delta_pm(scaled);
    CHECK(db.plus == doctest::Approx(factor * da.plus).epsilon(1e-12));
    CHECK(db.minus == doctest::Approx(factor * da.minus).epsilon(1e-12));
}

TEST_CASE("decibel conversion") {
    CHECK(to_decibels(0.83) == doctest::Approx(-0.809).epsilon(1e-2));
    EstimateWithError e;
    e.value = 0.83;
    e.sigma_low = 0.02;
    e.sigma_high = 0.02;
    const EstimateWithError db = to_decibels(e);
    CHECK(db.value == doctest::Approx(-0.809).epsilon(1e-2));
    CHECK(db.sigma_low == doctest::Approx(0.107).epsilon(0.05));
    CHECK(db.sigma_high == doctest::Approx(0.104).epsilon(0.05));
}

TEST_CASE("kitagawa_ueda_check") {
    const SqueezingCheck ok = kitagawa_ueda_check(0.83, 0.85);
    CHECK(ok.satisfied);
    CHECK(ok.margin == doctest::Approx(0.02).epsilon(1e-12));
    CHECK_FALSE(kitagawa_ueda_check(1.0, 0.85).satisfied);
    CHECK_FALSE(kitagawa_ueda_check(0.85, 0.85).satisfied);
    CHECK_THROWS_AS(kitagawa_ueda_check(0.5, 1.5), std::invalid_argument);
}
