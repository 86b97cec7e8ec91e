#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace spinfb {

/// Largest supported spin count for the exact model (the joint table is
/// (N+1)^2 and sector work scales like N^4).
inline constexpr int kMaxMixedSpins = 256;

/// Completely mixed N-spin ensemble, decomposed over total-angular-momentum
/// sectors j = j0, j0+1, ..., N/2 (j0 = 0 for even N, 1/2 for odd N).
/// Half-integer bookkeeping uses doubled quantum numbers (two_j, two_m).
struct MixedSpinModel {
    int n_spins = 0;

    explicit MixedSpinModel(int n);

    double total_spin() const { return n_spins / 2.0; }  ///< J = N/2
    int two_j_min() const { return n_spins % 2; }
};

/// Multiplicity of the spin-j sector of N spins:
/// P_Nj = N! (2j+1) / ((N/2-j)! (N/2+j+1)!), exact.
boost::multiprecision::cpp_int degeneracy(int n_spins, int two_j);

/// d^j_{m1,m0}(beta) = <j,m1| exp(-i beta J_y) |j,m0>.
///
/// Computed from the eigendecomposition of the real symmetric tridiagonal
/// similarity of J_y (phases i^m), which stays orthogonal to machine
/// precision for all supported j. The explicit factorial-sum formula loses
/// ~14 digits to cancellation by j = 50 and is kept only as a small-j test
/// oracle.
double wigner_d(int two_j, int two_m1, int two_m0, double beta);

/// Full rotation matrix, rows m1, columns m0, index a = m + j.
Eigen::MatrixXd wigner_d_matrix(int two_j, double beta);

/// Eigensystem of J_y for one sector, reusable across rotation angles;
/// column(beta, a0) costs O((2j+1)^2).
class SpinRotation {
  public:
    explicit SpinRotation(int two_j);

    int two_j() const { return two_j_; }
    int dim() const { return two_j_ + 1; }

    Eigen::VectorXd column(double beta, int a0) const;
    Eigen::MatrixXd matrix(double beta) const;

  private:
    int two_j_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

/// Joint outcome distribution p(m0, m1) of the pre- and post-feedback
/// projection measurements, indexed by k = m + N/2 in 0..N.
struct JointTable {
    double gain = 0.0;
    int n_spins = 0;
    Eigen::MatrixXd p;

    double projection(Eigen::Index k) const {
        return static_cast<double>(k) - n_spins / 2.0;
    }
};

/// Per-model cache of sector weights and rotation eigensystems.
class MixedStateSolver {
  public:
    explicit MixedStateSolver(const MixedSpinModel& model);

    /// p(m0, m1) = 2^-N sum_j P_Nj |d^j_{m1,m0}(g m0)|^2.
    JointTable joint_distribution(double gain) const;

  private:
    int n_spins_;
    std::vector<int> two_js_;
    std::vector<double> weights_;  ///< P_Nj / 2^N
    std::vector<SpinRotation> rotations_;
};

JointTable joint_distribution(const MixedSpinModel& model, double gain);

struct TableMoments {
    double mean_first = 0.0;
    double mean_second = 0.0;
    double var_first = 0.0;   ///< V(m0)
    double var_second = 0.0;  ///< V(m1)
    double covariance = 0.0;
    double var_sum = 0.0;   ///< V(m0 + m1)
    double var_diff = 0.0;  ///< V(m0 - m1)
};

TableMoments moments(const JointTable& table);

/// xi_unp = V(m1) / V(m0).
double xi_unpolarized(const MixedSpinModel& model, double gain);

struct GainScanRow {
    double gain = 0.0;
    double xi_unp = 0.0;
    double delta_plus_sq = 0.0;   ///< V(m0+m1)/(2J)
    double delta_minus_sq = 0.0;  ///< V(m0-m1)/(2J)
};

std::vector<GainScanRow> gain_scan(const MixedSpinModel& model,
                                   const std::vector<double>& grid);

}  // namespace spinfb
