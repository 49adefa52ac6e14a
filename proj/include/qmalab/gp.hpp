#pragma once

#include <functional>
#include <vector>

#include "qmalab/torus.hpp"

namespace qmalab {

/// Smoothing family tau_k(x) = (x + sqrt(x^2 + k^{-2}))/2: smooth, strictly
/// positive, decreasing in k, with tau_k(x) -> max(x, 0) and tau_k >= max(x, 0).
double tau(double k, double x);
/// Pointwise limit max(x, 0).
double tau_limit(double x);

/// Coordinate ball B(z0, 2r) with r <= 1/2, reduced to the radial variable
/// s = |z - z0|^2 on a uniform grid of `nodes` points over [0, (2r)^2]. The
/// test-function parameter s ranges over (0, 2 r^2).
struct BallModel {
    int n = 1;
    double r = 0.25;
    int nodes = 513;

    BallModel(int n_, double r_, int nodes_);
    double S() const { return 4.0 * r * r; }
    double s_param_max() const { return 2.0 * r * r; }
    std::vector<double> s_grid() const;
};

/// Radially symmetrized data around the minimum point: spherical means of phi
/// and of e^{2nF} as functions of s.
struct RadialInstance {
    BallModel ball;
    std::vector<double> s;
    std::vector<double> phi;
    std::vector<double> rhs_exp;   // e^{2nF} profile
    double phi_center = 0.0;
    /// min over sampled boundary points of phi - phi_center (>= 0 when the
    /// center is the true minimum); 0 for synthetic instances.
    double boundary_phi_margin = 0.0;

    explicit RadialInstance(const BallModel& b);
};

/// phi == const, F == 0: everything in closed form.
RadialInstance constant_radial_instance(const BallModel& ball);

/// Restrict a torus field to the ball around its arg-min (periodic wrap) and
/// average over a deterministic direction set; needs 2r <= 1/2 to fit.
RadialInstance radial_instance_from_torus(const ScalarField& phi, const ScalarField& F,
                                          const BallModel& ball, int directions, uint64_t seed);

/// u_s(s) = phi(s) - phi(z0) + s/2 - s_param on the radial grid. Rejects
/// s_param outside (0, 2r^2) and boundary-positivity violations.
std::vector<double> u_s_profile(const RadialInstance& inst, double s_param);

/// Radial weight of the omega_I^{2n} measure: integrals over the ball are
/// radial_weight(m) * integral of f(s) s^{m-1} ds with m = 2n.
double radial_weight(int m);

/// A_{s,k} = integral of tau_k(-u_s) e^{2nF} against omega_I^{2n};
/// k = infinity gives the limit A_s with tau replaced by the positive part.
double mass_A(const RadialInstance& inst, double s_param, double k);

struct RadialSolution {
    std::vector<double> s;
    std::vector<double> psi;      // psi <= 0, psi(S) = 0
    std::vector<double> uprime;   // d psi / d s >= 0
};

/// Dirichlet problem for the radial complex Monge-Ampere reduction on C^m:
/// d/ds [s^m u'(s)^m] = m s^{m-1} g(s), psi(S) = 0, via per-interval
/// Gauss-Legendre quadrature of the cumulative integral. Requires g >= 0 and
/// integrable at 0.
RadialSolution radial_cma_dirichlet(const std::function<double(double)>& g, int m, double S,
                                    int nodes);

/// Total Monge-Ampere mass of a radial solution, from the reduction run
/// forward: (2 pi S u'(S))^m.
double ma_mass(const RadialSolution& sol, int m);

/// Mass of a density g directly: radial_weight(m) 2^m * integral g s^{m-1} ds.
double ma_mass_of_density(const std::function<double(double)>& g, int m, double S, int intervals);

struct ClaimReport {
    double C_empirical = 0.0;
    size_t active_nodes = 0;  // nodes with u_s < 0
};

/// Smallest constant C with -u_s <= eps (-psi)^{2n/(2n+1)}, eps^{2n+1} = C A_{s,k},
/// i.e. max over the sublevel set of (-u)^{2n+1} / ((-psi)^{2n} A_{s,k}).
ClaimReport verify_claim(const std::vector<double>& s, const std::vector<double>& u,
                         const std::vector<double>& psi, double A_sk, int n);

struct GpSweepRow {
    double s_param = 0.0;
    double k = 0.0;
    double A_sk = 0.0;
    double C_empirical = 0.0;
    double min_margin = 0.0;  // u_s at the boundary node (positivity margin)
};

/// Full pipeline over an (s, k) grid: u_s, A_{s,k}, normalized auxiliary
/// Dirichlet solution, claim constant.
std::vector<GpSweepRow> gp_claim_sweep(const RadialInstance& inst,
                                       const std::vector<double>& s_fracs,
                                       const std::vector<double>& k_values);

}  // namespace qmalab
