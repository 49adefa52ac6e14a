#pragma once

#include <Eigen/Dense>

namespace qmalab {

/// The standard flat hypercomplex structure on R^{4n} = C^{2n} = H^n.
///
/// Conventions, fixed here once and consumed by every other module:
///  - quaternion coordinate a has real components x_{4a..4a+3},
///    q_a = x_{4a} + x_{4a+1} i + x_{4a+2} j + x_{4a+3} k;
///  - complex coordinates z_{2a} = x_{4a} + i x_{4a+1}, z_{2a+1} = x_{4a+2} + i x_{4a+3},
///    so q_a = z_{2a} + z_{2a+1} j;
///  - I, J, K act as left quaternion multiplication by i, j, k, hence
///    I*J*K = -Id as a matrix product and the z's are I-holomorphic;
///  - J is antiholomorphic: z(J x) = j_complex() * conj(z(x)) with the 2x2 blocks
///    [[0,-1],[1,0]], which is the matrix form of J mapping (1,0) to (0,1).
class HypercomplexFrame {
  public:
    static HypercomplexFrame standard(int n);

    int n() const { return n_; }
    int real_dim() const { return 4 * n_; }
    int complex_dim() const { return 2 * n_; }

    const Eigen::MatrixXd& I_mat() const { return I_; }
    const Eigen::MatrixXd& J_mat() const { return J_; }
    const Eigen::MatrixXd& K_mat() const { return K_; }

    /// 2n x 4n matrix B with z(x) = B x.
    const Eigen::MatrixXcd& complex_basis() const { return basis_; }

    /// Real 2n x 2n matrix Jz with z(J x) = Jz * conj(z(x)).
    const Eigen::MatrixXd& j_complex() const { return Jz_; }

    /// Block-diagonal [[0,1],[-1,0]] = -Jz; the coefficient matrix of the
    /// standard hyperhermitian form Omega_std = sum_a dz_{2a} ^ dz_{2a+1}.
    const Eigen::MatrixXd& epsilon() const { return eps_; }

    /// Max deviation from the defining identities I^2=J^2=K^2=-Id, IJK=-Id,
    /// orthogonality of I, J, K, and z(Jx) = Jz conj(z(x)).
    double invariant_error() const;

  private:
    explicit HypercomplexFrame(int n);

    int n_;
    Eigen::MatrixXd I_, J_, K_;
    Eigen::MatrixXcd basis_;
    Eigen::MatrixXd Jz_, eps_;
};

}  // namespace qmalab
