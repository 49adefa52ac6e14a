#pragma once

#include <stdexcept>
#include <string>

#include "qmalab/operators.hpp"
#include "qmalab/torus.hpp"

namespace qmalab {

/// Per-grid-point 2n x 2n complex matrices, stored contiguously.
struct HermitianField {
    int n = 0;
    size_t pts = 0;
    std::vector<std::complex<double>> data;

    HermitianField() = default;
    HermitianField(int n_, size_t pts_)
        : n(n_), pts(pts_), data(pts_ * size_t(4 * n_ * n_), std::complex<double>(0.0, 0.0)) {}

    Eigen::Map<const Eigen::MatrixXcd> at(size_t p) const {
        const int m = 2 * n;
        return {data.data() + p * size_t(m) * size_t(m), m, m};
    }
    Eigen::Map<Eigen::MatrixXcd> at(size_t p) {
        const int m = 2 * n;
        return {data.data() + p * size_t(m) * size_t(m), m, m};
    }
};

/// Complex Hessian phi_{i jbar} at every grid point, by spectral differentiation.
HermitianField complex_hessian_field(const ScalarField& phi, const HypercomplexFrame& frame);

/// Hyperhermitian part of the complex Hessian: the perturbation of the metric
/// form produced by phi. This is what enters the eigenvalue pencil.
HermitianField quaternionic_hessian_field(const ScalarField& phi, const HypercomplexFrame& frame);

/// Pointwise path that bypasses the grid: complex Hessian from a real 4n x 4n
/// second-derivative matrix (used for non-periodic closed-form inputs).
Eigen::MatrixXcd complex_hessian_from_real(const Eigen::MatrixXd& H,
                                           const HypercomplexFrame& frame);

struct SolveOptions {
    double tol = 1e-8;            // Newton residual (sup norm)
    int max_iters = 50;
    double krylov_tol = 1e-10;    // relative, for the linearized solves
    int krylov_max = 400;
    double step_floor = 1e-6;     // line-search damping floor
    double range_guard = 1e6;     // max allowed dynamic range of e^F
    bool force = false;           // bypass the range guard
    bool verbose = false;
};

class SolveFailure : public std::runtime_error {
  public:
    SolveFailure(const std::string& what, double last_residual_, int iters_)
        : std::runtime_error(what), last_residual(last_residual_), iters(iters_) {}
    double last_residual;
    int iters;
};

struct SolveResult {
    ScalarField phi;          // normalized so sup phi = 0
    double b = 0.0;           // solvability constant: f(lambda(phi)) = e^{F + b}
    double residual_inf = 0.0;
    int newton_iters = 0;
    double min_eig_margin = 0.0;   // distance of lambda(phi) to the cone boundary
    double max_pairing_gap = 0.0;  // worst relative eigenvalue-pair splitting
};

/// Damped Newton for log f(lambda(phi)) = F + b on the flat torus, with the
/// mean-zero gauge on phi and b as an extra unknown; the returned phi is
/// shifted to sup phi = 0. Linearized systems are solved matrix-free
/// (BiCGStab, constant-coefficient spectral preconditioner). Throws
/// SolveFailure on divergence or persistent cone-boundary rejection.
SolveResult solve(const OperatorSpec& spec, const ScalarField& F, const HypercomplexFrame& frame,
                  const SolveOptions& opts = {});

struct L1Report {
    double l1_norm = 0.0;
    /// min over the grid of sum_i(lambda_i - 1) + n; >= 0 is the trace form of
    /// the cone condition on the perturbed form.
    double trace_margin = 0.0;
};
L1Report l1_check(const SolveResult& result, const HypercomplexFrame& frame);

struct SolutionCheck {
    double forward_backward_err = 0.0;  // sup |f(lambda(phi)) e^{-b} - e^F|
    double min_cone_margin = 0.0;
    double max_pairing_gap = 0.0;
    double pf_identity_rel_err = 0.0;   // Pf(Omega_phi)/Pf(Omega) vs e^{n(F+b)}
};
SolutionCheck verify_solution(const OperatorSpec& spec, const ScalarField& F,
                              const SolveResult& result, const HypercomplexFrame& frame);

}  // namespace qmalab
