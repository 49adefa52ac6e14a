#include "qmalab/comparison.hpp"

#include <stdexcept>

namespace qmalab {

namespace {
void require_psd(const HermitianForm& alpha, const char* who) {
    if (alpha.hermiticity_error() > 1e-10 * std::max(1.0, alpha.A.cwiseAbs().maxCoeff()))
        throw std::invalid_argument(std::string(who) + ": input is not hermitian");
    double scale = std::max(1.0, std::abs(alpha.A.trace().real()));
    if (alpha.min_eigenvalue() < -1e-12 * scale)
        throw std::invalid_argument(std::string(who) + ": input is not PSD");
}
}  // namespace

HermitianForm j_pullback(const HermitianForm& alpha, const HypercomplexFrame& frame) {
    if (alpha.n != frame.n()) throw std::invalid_argument("j_pullback: dimension mismatch");
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    return {alpha.n, -Jz.transpose() * alpha.A.conjugate() * Jz};
}

HermitianForm hyperhermitian_part(const HermitianForm& alpha, const HypercomplexFrame& frame) {
    HermitianForm beta = j_pullback(alpha, frame);
    return {alpha.n, alpha.A - beta.A};
}

Eigen::MatrixXcd quaternionic_hessian_matrix(const Eigen::MatrixXcd& A,
                                             const HypercomplexFrame& frame) {
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    return -(A * Jz + Jz * A.conjugate());
}

Lemma31Report check_lemma31(const HermitianForm& alpha, const HypercomplexFrame& frame) {
    require_psd(alpha, "check_lemma31");
    const HermitianForm sum = hyperhermitian_part(alpha, frame);
    Lemma31Report r;
    r.lhs_det = sum.A.determinant().real();
    r.rhs_det = alpha.A.determinant().real();
    r.margin = r.lhs_det - r.rhs_det;
    return r;
}

Prop32Report check_prop32(const HermitianForm& phi_hessian, const HypercomplexFrame& frame) {
    require_psd(phi_hessian, "check_prop32");
    const int n = phi_hessian.n;
    const double cn = volume_constant(n);
    const HermitianForm hh = hyperhermitian_part(phi_hessian, frame);
    Prop32Report r;
    r.quat_side = cn * hh.A.determinant().real();
    r.complex_side = cn * phi_hessian.A.determinant().real();
    r.margin = r.quat_side - r.complex_side;
    const std::complex<double> pf = pfaffian(quaternionic_hessian_matrix(phi_hessian.A, frame));
    r.pfaffian_rel_err = std::abs(cn * std::norm(pf) - r.quat_side) / std::max(1.0, r.quat_side);
    return r;
}

}  // namespace qmalab
