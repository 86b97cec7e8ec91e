#include "spinfb/exact_spin.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinfb/errors.hpp"

namespace spinfb {

namespace mp = boost::multiprecision;

namespace {

void check_sector(int n_spins, int two_j) {
    if (n_spins < 1) {
        throw std::invalid_argument("n_spins must be >= 1");
    }
    if (two_j < 0 || two_j > n_spins || (n_spins - two_j) % 2 != 0) {
        throw InvalidJ("two_j = " + std::to_string(two_j) +
                       " is not on the ladder of N = " +
                       std::to_string(n_spins));
    }
}

mp::cpp_int factorial(int n) {
    mp::cpp_int f = 1;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

}  // namespace

MixedSpinModel::MixedSpinModel(int n) : n_spins(n) {
    if (n < 1) {
        throw std::invalid_argument("n_spins must be >= 1");
    }
    if (n > kMaxMixedSpins) {
        throw SizeExceeded("n_spins exceeds the exact-model bound " +
                           std::to_string(kMaxMixedSpins));
    }
}

mp::cpp_int degeneracy(int n_spins, int two_j) {
    check_sector(n_spins, two_j);
    const int lower = (n_spins - two_j) / 2;      // N/2 - j
    const int upper = (n_spins + two_j) / 2 + 1;  // N/2 + j + 1
    return factorial(n_spins) * (two_j + 1) / (factorial(lower) * factorial(upper));
}

SpinRotation::SpinRotation(int two_j) : two_j_(two_j) {
    if (two_j < 0) {
        throw InvalidJ("two_j must be >= 0");
    }
    const int n = two_j + 1;
    const double j = two_j / 2.0;
    // J_y similarity-transformed by diag(i^m) is real symmetric tridiagonal
    // with zero diagonal and off-diagonal sqrt(j(j+1) - m(m+1))/2.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 1));
    for (int a = 0; a + 1 < n; ++a) {
        const double m = -j + a;
        off(a) = std::sqrt(j * (j + 1.0) - m * (m + 1.0)) / 2.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off.head(std::max(n - 1, 0)));
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXd SpinRotation::column(double beta, int a0) const {
    const int n = dim();
    if (a0 < 0 || a0 >= n) {
        throw InvalidProjection("column index out of range");
    }
    if (beta == 0.0) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
        unit(a0) = 1.0;
        return unit;
    }
    const Eigen::ArrayXd angles = beta * eigenvalues_.array();
    const Eigen::ArrayXd row = eigenvectors_.row(a0).transpose().array();
    const Eigen::VectorXd z_re =
        eigenvectors_ * (row * angles.cos()).matrix();
    const Eigen::VectorXd z_im =
        eigenvectors_ * (-(row * angles.sin())).matrix();

    // d = i^{a0-a} (z_re + i z_im), real part by construction.
    Eigen::VectorXd d(n);
    for (int a = 0; a < n; ++a) {
        switch (((a0 - a) % 4 + 4) % 4) {
            case 0: d(a) = z_re(a); break;
            case 1: d(a) = -z_im(a); break;
            case 2: d(a) = -z_re(a); break;
            default: d(a) = z_im(a); break;
        }
    }
    return d;
}

Eigen::MatrixXd SpinRotation::matrix(double beta) const {
    const int n = dim();
    Eigen::MatrixXd d(n, n);
    for (int a0 = 0; a0 < n; ++a0) {
        d.col(a0) = column(beta, a0);
    }
    return d;
}

double wigner_d(int two_j, int two_m1, int two_m0, double beta) {
    if (two_j < 0) {
        throw InvalidJ("two_j must be >= 0");
    }
    for (const int two_m : {two_m1, two_m0}) {
        if (std::abs(two_m) > two_j || (two_j - two_m) % 2 != 0) {
            throw InvalidProjection("projection off the ladder of j");
        }
    }
    const SpinRotation rot(two_j);
    return rot.column(beta, (two_m0 + two_j) / 2)((two_m1 + two_j) / 2);
}

Eigen::MatrixXd wigner_d_matrix(int two_j, double beta) {
    return SpinRotation(two_j).matrix(beta);
}

MixedStateSolver::MixedStateSolver(const MixedSpinModel& model)
    : n_spins_(model.n_spins) {
    const double scale = std::ldexp(1.0, -n_spins_);  // 2^-N
    for (int two_j = model.two_j_min(); two_j <= n_spins_; two_j += 2) {
        two_js_.push_back(two_j);
        weights_.push_back(
            degeneracy(n_spins_, two_j).convert_to<double>() * scale);
        rotations_.emplace_back(two_j);
    }
}

JointTable MixedStateSolver::joint_distribution(double gain) const {
    const int n = n_spins_;
    JointTable table;
    table.gain = gain;
    table.n_spins = n;
    table.p = Eigen::MatrixXd::Zero(n + 1, n + 1);

    for (int k0 = 0; k0 <= n; ++k0) {
        const double m0 = k0 - n / 2.0;
        const double beta = gain * m0;
        for (std::size_t s = 0; s < two_js_.size(); ++s) {
            const int two_j = two_js_[s];
            const int offset = (n - two_j) / 2;  // k of the sector's m = -j
            const int a0 = k0 - offset;
            if (a0 < 0 || a0 > two_j) {
                continue;  // |m0| > j: sector does not reach this outcome
            }
            const Eigen::VectorXd col = rotations_[s].column(beta, a0);
            const double w = weights_[s];
            for (int a1 = 0; a1 <= two_j; ++a1) {
                table.p(k0, offset + a1) += w * col(a1) * col(a1);
            }
        }
    }
    return table;
}

JointTable joint_distribution(const MixedSpinModel& model, double gain) {
    return MixedStateSolver(model).joint_distribution(gain);
}

TableMoments moments(const JointTable& table) {
    const Eigen::Index n = table.p.rows();
    Eigen::VectorXd m(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        m(k) = table.projection(k);
    }
    const Eigen::VectorXd p0 = table.p.rowwise().sum();
    const Eigen::VectorXd p1 = table.p.colwise().sum();

    TableMoments out;
    out.mean_first = p0.dot(m);
    out.mean_second = p1.dot(m);
    out.var_first = (m.array() - out.mean_first).square().matrix().dot(p0);
    out.var_second = (m.array() - out.mean_second).square().matrix().dot(p1);
    const Eigen::VectorXd d0 = m.array() - out.mean_first;
    const Eigen::VectorXd d1 = m.array() - out.mean_second;
    out.covariance = d0.dot(table.p * d1);
    out.var_sum = out.var_first + out.var_second + 2.0 * out.covariance;
    out.var_diff = out.var_first + out.var_second - 2.0 * out.covariance;
    return out;
}

double xi_unpolarized(const MixedSpinModel& model, double gain) {
    const TableMoments m = moments(joint_distribution(model, gain));
    return m.var_second / m.var_first;
}

std::vector<GainScanRow> gain_scan(const MixedSpinModel& model,
                                   const std::vector<double>& grid) {
    if (grid.empty()) {
        throw std::invalid_argument("gain grid must be nonempty");
    }
    const MixedStateSolver solver(model);
    const double two_j_total = static_cast<double>(model.n_spins);  // 2J = N

    std::vector<GainScanRow> rows;
    rows.reserve(grid.size());
    for (const double g : grid) {
        const TableMoments m = moments(solver.joint_distribution(g));
        GainScanRow row;
        row.gain = g;
        row.xi_unp = m.var_second / m.var_first;
        row.delta_plus_sq = m.var_sum / two_j_total;
        row.delta_minus_sq = m.var_diff / two_j_total;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace spinfb
