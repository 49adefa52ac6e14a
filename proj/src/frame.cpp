#include "qmalab/frame.hpp"

#include <stdexcept>

namespace qmalab {

namespace {

// 4x4 blocks of left multiplication by i, j, k on (1, i, j, k) components.
void fill_block(Eigen::MatrixXd& M, int a, const double b[4][4]) {
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) M(4 * a + r, 4 * a + c) = b[r][c];
}

constexpr double kI[4][4] = {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
constexpr double kJ[4][4] = {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
constexpr double kK[4][4] = {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};

}  // namespace

HypercomplexFrame::HypercomplexFrame(int n) : n_(n) {
    const int d = 4 * n, c = 2 * n;
    I_ = Eigen::MatrixXd::Zero(d, d);
    J_ = Eigen::MatrixXd::Zero(d, d);
    K_ = Eigen::MatrixXd::Zero(d, d);
    basis_ = Eigen::MatrixXcd::Zero(c, d);
    Jz_ = Eigen::MatrixXd::Zero(c, c);
    eps_ = Eigen::MatrixXd::Zero(c, c);
    const std::complex<double> im(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        fill_block(I_, a, kI);
        fill_block(J_, a, kJ);
        fill_block(K_, a, kK);
        basis_(2 * a, 4 * a) = 1.0;
        basis_(2 * a, 4 * a + 1) = im;
        basis_(2 * a + 1, 4 * a + 2) = 1.0;
        basis_(2 * a + 1, 4 * a + 3) = im;
        Jz_(2 * a, 2 * a + 1) = -1.0;
        Jz_(2 * a + 1, 2 * a) = 1.0;
        eps_(2 * a, 2 * a + 1) = 1.0;
        eps_(2 * a + 1, 2 * a) = -1.0;
    }
}

HypercomplexFrame HypercomplexFrame::standard(int n) {
    if (n < 1) throw std::invalid_argument("standard_frame: n must be >= 1");
    return HypercomplexFrame(n);
}

double HypercomplexFrame::invariant_error() const {
    const int d = 4 * n_;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    double e = 0.0;
    e = std::max(e, (I_ * I_ + id).cwiseAbs().maxCoeff());
    e = std::max(e, (J_ * J_ + id).cwiseAbs().maxCoeff());
    e = std::max(e, (K_ * K_ + id).cwiseAbs().maxCoeff());
    e = std::max(e, (I_ * J_ * K_ + id).cwiseAbs().maxCoeff());
    // g = Ig = Jg = Kg for the euclidean metric, i.e. the matrices are orthogonal.
    e = std::max(e, (I_.transpose() * I_ - id).cwiseAbs().maxCoeff());
    e = std::max(e, (J_.transpose() * J_ - id).cwiseAbs().maxCoeff());
    e = std::max(e, (K_.transpose() * K_ - id).cwiseAbs().maxCoeff());
    // (1,0) -> (0,1): B J = Jz conj(B).
    e = std::max(e, (basis_ * J_ - Jz_ * basis_.conjugate()).cwiseAbs().maxCoeff());
    return e;
}

}  // namespace qmalab
