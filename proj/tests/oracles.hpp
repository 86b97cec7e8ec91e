#pragma once

// Independent oracles shared by the unit and acceptance suites. These stay
// deliberately naive: they trade speed for being verifiable by inspection
// and for exercising none of the production code paths they check.

#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <vector>

namespace spinfb::oracles {

/// Wigner's factorial sum formula in log space with sign tracking.
/// Accurate only for small j: the alternating sum cancels catastrophically
/// by j ~ 25, which is why the production path diagonalizes J_y instead.
inline double wigner_sum_formula(int two_j, int two_m1, int two_m0,
                                 double beta) {
    const double j = two_j / 2.0;
    const double m1 = two_m1 / 2.0;
    const double m0 = two_m0 / 2.0;
    const double pref =
        0.5 * (std::lgamma(j + m1 + 1.0) + std::lgamma(j - m1 + 1.0) +
               std::lgamma(j + m0 + 1.0) + std::lgamma(j - m0 + 1.0));
    const double c = std::cos(beta / 2.0);
    const double s = std::sin(beta / 2.0);
    const int kmin = std::max(0, (two_m0 - two_m1) / 2);
    const int kmax = std::min((two_j + two_m0) / 2, (two_j - two_m1) / 2);
    double total = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const int pc = two_j - 2 * k + (two_m0 - two_m1) / 2;
        const int ps = 2 * k - (two_m0 - two_m1) / 2;
        if ((c == 0.0 && pc > 0) || (s == 0.0 && ps > 0)) {
            continue;
        }
        double lmag = pref - std::lgamma(j + m0 - k + 1.0) -
                      std::lgamma(k + 1.0) - std::lgamma(j - k - m1 + 1.0) -
                      std::lgamma(m1 - m0 + k + 1.0);
        if (pc != 0) lmag += pc * std::log(std::abs(c));
        if (ps != 0) lmag += ps * std::log(std::abs(s));
        double sign = ((k + (two_m1 - two_m0) / 2) % 2) ? -1.0 : 1.0;
        if (c < 0.0 && pc % 2) sign = -sign;
        if (s < 0.0 && ps % 2) sign = -sign;
        total += sign * std::exp(lmag);
    }
    return total;
}

/// Full 2^N product-basis computation of the mixed-state joint outcome
/// distribution: project the identity state onto the m0 sector, rotate each
/// spin by gain*m0 about y, and read the m1 sector populations. The mixed
/// state is diagonal in the product basis, so amplitudes factor into
/// single-spin rotation columns.
inline Eigen::MatrixXd brute_force_joint(int n, double gain) {
    const int dim = 1 << n;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int b0 = 0; b0 < dim; ++b0) {
        const int k0 = std::popcount(static_cast<unsigned>(b0));
        const double beta = gain * (k0 - n / 2.0);
        const double c = std::cos(beta / 2.0);
        const double s = std::sin(beta / 2.0);
        // single-spin rotation u(new_bit, old_bit), bit 1 = up
        const double u[2][2] = {{c, -s}, {s, c}};
        std::vector<double> amp{1.0};
        for (int spin = 0; spin < n; ++spin) {
            const int old_bit = (b0 >> spin) & 1;
            std::vector<double> next(amp.size() * 2);
            for (std::size_t idx = 0; idx < amp.size(); ++idx) {
                next[idx] = amp[idx] * u[0][old_bit];
                next[idx + amp.size()] = amp[idx] * u[1][old_bit];
            }
            amp = std::move(next);
        }
        for (int b1 = 0; b1 < dim; ++b1) {
            const int k1 = std::popcount(static_cast<unsigned>(b1));
            p(k0, k1) += amp[static_cast<std::size_t>(b1)] *
                         amp[static_cast<std::size_t>(b1)] / dim;
        }
    }
    return p;
}

}  // namespace spinfb::oracles
