#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmalab/forms.hpp"

namespace qmalab {

/// The n deduplicated eigenvalues of a hyperhermitian pencil, sorted descending.
struct EigTuple {
    std::vector<double> lambda;
    /// Worst adjacent-pair splitting of the 2n hermitian spectrum, relative to
    /// the spectral radius; J-reality forces this to be tiny.
    double pairing_gap_rel = 0.0;
};

/// Degree-one homogeneous symmetric operator f on a Garding-type cone Gamma,
/// normalized by f(1,...,1) = 1, with positive partials (ellipticity) and
/// prod_i df/dlambda_i >= gamma on the cone.
struct OperatorSpec {
    std::string name;
    int n = 0;
    double gamma = 0.0;
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    std::function<bool(const std::vector<double>&)> in_cone;
    /// Signed slack of the cone's defining inequalities (positive inside).
    std::function<double(const std::vector<double>&)> cone_margin;

    double evaluate(const std::vector<double>& lam) const;
    std::vector<double> grad_checked(const std::vector<double>& lam) const;
};

/// Geometric mean (prod lambda_i)^{1/n} on the positive orthant: the
/// quaternionic Monge-Ampere operator. gamma is evaluated from the gradient
/// product at the normalized point.
OperatorSpec qma_operator(int n);

/// Arithmetic mean (sum lambda_i)/n on {sum > 0}: the quaternionic Laplacian.
OperatorSpec laplace_operator(int n);

/// (sigma_k / binom(n,k))^{1/k} on the Garding cone {sigma_1,...,sigma_k > 0}.
/// k = 1 is the arithmetic mean, k = n the geometric mean.
OperatorSpec sigma_operator(int n, int k);

/// max_i lambda_i, a deliberately inadmissible operator: partials vanish off
/// the argmax, so the structural checker must produce a witness.
OperatorSpec max_eigenvalue_operator(int n);

/// Eigenvalues of the pencil (omega_phi, omega) through the associated
/// hermitian matrices; the 2n-spectrum must pair up (J-invariance) and is
/// deduplicated by averaging adjacent pairs. Throws if omega is not positive
/// definite or the pairing gap exceeds pair_tol * spectral radius.
EigTuple eigenvalues(const HyperhermitianForm& omega_phi, const HyperhermitianForm& omega,
                     const HypercomplexFrame& frame, double pair_tol = 1e-8);

/// Same, for a 2n x 2n J-invariant hermitian matrix relative to the identity.
EigTuple paired_eigenvalues(const Eigen::MatrixXcd& h_phi, double pair_tol = 1e-8);

struct StructuralViolation {
    std::string what;
    std::vector<double> witness;
};

struct StructuralReport {
    int samples = 0;
    int passed = 0;
    double min_partial = 0.0;
    double min_product = 0.0;
    double max_grad_rel_err = 0.0;
    double max_euler_rel_err = 0.0;
    double max_symmetry_err = 0.0;
    std::optional<StructuralViolation> violation;
    bool ok() const { return !violation.has_value() && passed == samples; }
};

/// Samples the cone (log-uniform radius, Dirichlet angular directions, plus
/// boundary-pushed points for cones larger than the orthant) and verifies:
/// positive partials, gradient vs central differences, Euler's relation,
/// permutation symmetry, and prod_i df_i >= gamma (1 - 1e-8).
StructuralReport check_structural(const OperatorSpec& spec, int samples, uint64_t seed);

/// d(log f) = grad f / f at lam; the coefficients of the linearized operator.
std::vector<double> linearization_coeffs(const OperatorSpec& spec, const std::vector<double>& lam);

/// Numerically tests f >= (prod lambda)^{1/n} on positive-orthant samples
/// (the domination criterion guaranteeing the gradient-product lower bound).
bool dominates_geometric_mean(const OperatorSpec& spec, int samples, uint64_t seed,
                              double* worst_gap = nullptr);

}  // namespace qmalab
