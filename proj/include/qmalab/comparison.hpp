#pragma once

#include "qmalab/forms.hpp"

namespace qmalab {

/// alpha(.J, .J) as a (1,1)-form matrix: -Jz^T conj(A) Jz. Note the sign: the
/// pullback of omega_I is -omega_I, so callers wanting the PSD companion form
/// take beta = -j_pullback(alpha).
HermitianForm j_pullback(const HermitianForm& alpha, const HypercomplexFrame& frame);

/// alpha - alpha(.J, .J); J-invariant, PSD whenever alpha is PSD, and equal to
/// the hermitian avatar of the (2,0)-form built by quaternionic_hessian_matrix.
HermitianForm hyperhermitian_part(const HermitianForm& alpha, const HypercomplexFrame& frame);

/// Coefficient matrix of the (2,0)-form with phi_{i jbar} = A: -(A Jz + Jz conj(A)).
/// Equals eps * conj(hyperhermitian_part(A)).
Eigen::MatrixXcd quaternionic_hessian_matrix(const Eigen::MatrixXcd& A,
                                             const HypercomplexFrame& frame);

struct Lemma31Report {
    double lhs_det = 0.0;  // det(alpha + beta)
    double rhs_det = 0.0;  // det(alpha)
    double margin = 0.0;   // lhs - rhs
    bool holds(double tol = 1e-10) const { return margin >= -tol * std::max(1.0, rhs_det); }
};

/// det(alpha - alpha(.J,.J)) >= det(alpha) for PSD alpha; the pointwise matrix
/// statement of the wedge-power inequality. Rejects non-PSD input.
Lemma31Report check_lemma31(const HermitianForm& alpha, const HypercomplexFrame& frame);

struct Prop32Report {
    double quat_side = 0.0;     // c(n) det(hyperhermitian part)
    double complex_side = 0.0;  // c(n) det(phi_hessian)
    double margin = 0.0;
    double pfaffian_rel_err = 0.0;  // |quat_side - c(n) |Pf|^2| / max(1, quat_side)
    bool holds(double tol = 1e-10) const { return margin >= -tol * std::max(1.0, complex_side); }
};

/// Quaternionic vs complex Monge-Ampere densities of a PSD complex Hessian,
/// cross-checked against the Pfaffian-squared route through the (2,0) matrix.
Prop32Report check_prop32(const HermitianForm& phi_hessian, const HypercomplexFrame& frame);

}  // namespace qmalab
