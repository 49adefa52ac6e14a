#pragma once

#include <Eigen/Dense>
#include <utility>

#include "qmalab/frame.hpp"
#include "qmalab/quaternion.hpp"

namespace qmalab {

/// Real (1,1)-form in the standard I-holomorphic frame, normalized so that the
/// identity matrix is omega_I: alpha = (i/2) sum A_{cd} dz_c ^ dz_bar_d.
struct HermitianForm {
    int n = 0;                // quaternionic dimension; A is 2n x 2n
    Eigen::MatrixXcd A;

    HermitianForm() = default;
    HermitianForm(int n_, Eigen::MatrixXcd A_);

    static HermitianForm identity(int n);

    double min_eigenvalue() const;
    /// PSD up to -tol_scale * max(1, |trace|) noise.
    bool is_psd(double tol_scale = 1e-12) const;
    double hermiticity_error() const;
};

/// (2,0)-form Omega = (1/2) sum W_{cd} dz_c ^ dz_d with W antisymmetric and
/// J-real: Jz^T W Jz = conj(W). Positive when Omega(X, XJ) >= 0, equivalently
/// when the associated hermitian form is PSD.
struct HyperhermitianForm {
    int n = 0;
    Eigen::MatrixXcd W;

    HyperhermitianForm() = default;
    HyperhermitianForm(int n_, Eigen::MatrixXcd W_);

    /// Omega_std = sum_a dz_{2a} ^ dz_{2a+1}.
    static HyperhermitianForm standard(int n);

    double antisymmetry_error() const;
    double j_reality_error(const HypercomplexFrame& frame) const;
    /// Omega(X, XJ) for a real tangent vector X (real for J-real W).
    std::complex<double> pairing(const Eigen::VectorXd& X, const HypercomplexFrame& frame) const;
    bool is_positive(const HypercomplexFrame& frame, double tol_scale = 1e-12) const;
};

/// Hermitian avatar h of a J-real antisymmetric W: h = -Jz^T conj(W); inverse of
/// hyperhermitian_from_hermitian. Positivity of Omega = PSD-ness of h.
HermitianForm associated_hermitian(const HyperhermitianForm& omega, const HypercomplexFrame& frame);

/// W = eps * conj(h); requires h J-invariant (Jz^T conj(h) Jz = h).
HyperhermitianForm hyperhermitian_from_hermitian(const HermitianForm& h, const HypercomplexFrame& frame);

/// Split a quaternion-hermitian H into H = h_bar + j Omega: the hermitian part
/// h_bar = g + i omega_I and the J-real (2,0) part Omega = omega_J - i omega_K.
/// Rejects non-hermitian input, reporting the first violating entry.
std::pair<HermitianForm, HyperhermitianForm> decompose(const QuaternionMatrix& H,
                                                       const HypercomplexFrame& frame);

/// Exact inverse of decompose; cross-validates that (h, omega) are consistent.
QuaternionMatrix recompose(const HermitianForm& h, const HyperhermitianForm& omega,
                           const HypercomplexFrame& frame);

/// Pfaffian of an even-dimensional antisymmetric complex matrix, computed by
/// Parlett-Reid skew tridiagonalization with partial pivoting.
std::complex<double> pfaffian(const Eigen::MatrixXcd& W);

/// Pfaffian of a J-real form; the imaginary part (roundoff) is discarded after
/// a sanity check.
double pfaffian(const HyperhermitianForm& omega);

/// Dimensional constant of Omega_std^n ^ conj(Omega_std^n) = c(n) omega_I^{2n},
/// evaluated by expanding both wedge powers in the standard frame.
double volume_constant(int n);

}  // namespace qmalab
