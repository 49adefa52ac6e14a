#include "qmalab/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qmalab/comparison.hpp"
#include "qmalab/forms.hpp"

namespace qmalab {

namespace {

/// Assemble phi_{i jbar} at one point from the packed second-derivative fields.
void hessian_at(const std::vector<std::vector<double>>& d2, size_t p, int n, int axes,
                Eigen::Map<Eigen::MatrixXcd> A) {
    const int m = 2 * n;
    for (int i = 0; i < m; ++i) {
        const int pi = 2 * i;
        for (int j = 0; j < m; ++j) {
            const int pj = 2 * j;
            const double re = 0.25 * (d2[TorusGrid::pair_index(pi, pj, axes)][p] +
                                      d2[TorusGrid::pair_index(pi + 1, pj + 1, axes)][p]);
            const double im = 0.25 * (d2[TorusGrid::pair_index(pi, pj + 1, axes)][p] -
                                      d2[TorusGrid::pair_index(pi + 1, pj, axes)][p]);
            A(i, j) = std::complex<double>(re, im);
        }
    }
}

struct PointEval {
    std::vector<double> lam;          // pts * n, ascending pairs deduplicated
    std::vector<double> logf;         // pts
    double min_margin = std::numeric_limits<double>::infinity();
    double max_pairing_gap = 0.0;
    bool in_cone = true;
};

/// Eigenvalues of Id + hh(A) at every point; stops early if the cone is left
/// (need_all=false) since such a step will be rejected anyway.
PointEval evaluate_points(const OperatorSpec& spec, const HermitianField& hh, bool need_all) {
    const int n = hh.n, m = 2 * n;
    PointEval ev;
    ev.lam.resize(hh.pts * size_t(n));
    ev.logf.resize(hh.pts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    Eigen::MatrixXcd M(m, m);
    std::vector<double> lam(static_cast<size_t>(n));
    for (size_t p = 0; p < hh.pts; ++p) {
        M = hh.at(p);
        for (int i = 0; i < m; ++i) M(i, i) += 1.0;
        es.compute(M, Eigen::EigenvaluesOnly);
        const auto& w = es.eigenvalues();
        const double radius = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
        for (int i = 0; i < n; ++i) {
            ev.max_pairing_gap =
                std::max(ev.max_pairing_gap, (w(2 * i + 1) - w(2 * i)) / radius);
            lam[static_cast<size_t>(i)] = 0.5 * (w(2 * i) + w(2 * i + 1));
            ev.lam[p * size_t(n) + size_t(i)] = lam[static_cast<size_t>(i)];
        }
        if (!spec.in_cone(lam)) {
            ev.in_cone = false;
            if (!need_all) return ev;
            ev.logf[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        ev.min_margin = std::min(ev.min_margin, spec.cone_margin(lam));
        ev.logf[p] = std::log(spec.value(lam));
    }
    return ev;
}

double residual_inf(const PointEval& ev, const std::vector<double>& F, double b) {
    double r = 0.0;
    for (size_t p = 0; p < F.size(); ++p) r = std::max(r, std::abs(ev.logf[p] - F[p] - b));
    return r;
}

/// Coefficients C_ab with  L(dphi) = sum_{a<=b} C_ab * d2_ab(dphi)  pointwise,
/// accumulated from S = sum_i (w_i/2) P_i via 2 Re tr(S A(dphi)).
struct LinearizedOperator {
    const TorusGrid* grid = nullptr;
    std::vector<std::vector<double>> C;

    std::vector<double> apply(const std::vector<double>& dphi) const {
        const auto d2 = grid->second_derivatives(dphi);
        std::vector<double> out(dphi.size(), 0.0);
        for (size_t k = 0; k < C.size(); ++k) {
            const auto& c = C[k];
            const auto& d = d2[k];
            for (size_t p = 0; p < out.size(); ++p) out[p] += c[p] * d[p];
        }
        return out;
    }
};

LinearizedOperator build_linearization(const OperatorSpec& spec, const TorusGrid& grid,
                                       const HermitianField& hh, double* trace_scale) {
    const int n = hh.n, m = 2 * n, axes = grid.axes();
    LinearizedOperator L;
    L.grid = &grid;
    L.C.assign(static_cast<size_t>(axes * (axes + 1) / 2),
               std::vector<double>(hh.pts, 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    Eigen::MatrixXcd M(m, m), S(m, m);
    std::vector<double> lam(static_cast<size_t>(n));
    double tr_acc = 0.0;
    for (size_t p = 0; p < hh.pts; ++p) {
        M = hh.at(p);
        for (int i = 0; i < m; ++i) M(i, i) += 1.0;
        es.compute(M);
        for (int i = 0; i < n; ++i)
            lam[static_cast<size_t>(i)] =
                0.5 * (es.eigenvalues()(2 * i) + es.eigenvalues()(2 * i + 1));
        const std::vector<double> w = linearization_coeffs(spec, lam);
        S.setZero();
        for (int i = 0; i < n; ++i) {
            const auto v0 = es.eigenvectors().col(2 * i);
            const auto v1 = es.eigenvectors().col(2 * i + 1);
            S.noalias() += (0.5 * w[static_cast<size_t>(i)]) *
                           (v0 * v0.adjoint() + v1 * v1.adjoint());
        }
        tr_acc += S.trace().real();
        // 2 Re tr(S A(dphi)) as real coefficients on the d2 fields
        for (int i = 0; i < m; ++i) {
            const int pi = 2 * i;
            for (int j = 0; j < m; ++j) {
                const int pj = 2 * j;
                const double sr = 0.5 * S(j, i).real();
                const double si = 0.5 * S(j, i).imag();
                L.C[TorusGrid::pair_index(pi, pj, axes)][p] += sr;
                L.C[TorusGrid::pair_index(pi + 1, pj + 1, axes)][p] += sr;
                L.C[TorusGrid::pair_index(pi, pj + 1, axes)][p] -= si;
                L.C[TorusGrid::pair_index(pi + 1, pj, axes)][p] += si;
            }
        }
    }
    if (trace_scale) *trace_scale = tr_acc / double(hh.pts) / double(m);
    return L;
}

double vmean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

/// Exact inverse of the model system  (sbar/2) Lap v - db = r, mean(v) = rho.
struct Preconditioner {
    const TorusGrid* grid;
    double sbar;

    Eigen::VectorXd apply(const Eigen::VectorXd& in) const {
        const size_t P = grid->points();
        std::vector<double> r(P);
        for (size_t p = 0; p < P; ++p) r[p] = in(static_cast<Eigen::Index>(p));
        const double rho = in(static_cast<Eigen::Index>(P));
        const double db = -vmean(r);
        for (double& x : r) x = (x + db) * (2.0 / sbar);
        std::vector<double> v = grid->poisson_solve(r);
        Eigen::VectorXd out(P + 1);
        for (size_t p = 0; p < P; ++p) out(static_cast<Eigen::Index>(p)) = v[p] + rho;
        out(static_cast<Eigen::Index>(P)) = db;
        return out;
    }
};

/// Right-preconditioned BiCGStab for the augmented system
///   [ L(dphi) - db ; mean(dphi) ] = rhs.
bool bicgstab(const LinearizedOperator& L, const Preconditioner& Pc, const Eigen::VectorXd& rhs,
              Eigen::VectorXd& x, double rtol, int maxit) {
    const size_t P = L.grid->points();
    auto apply_full = [&](const Eigen::VectorXd& u) {
        std::vector<double> dphi(P);
        for (size_t p = 0; p < P; ++p) dphi[p] = u(static_cast<Eigen::Index>(p));
        const double db = u(static_cast<Eigen::Index>(P));
        std::vector<double> Lv = L.apply(dphi);
        Eigen::VectorXd out(P + 1);
        for (size_t p = 0; p < P; ++p) out(static_cast<Eigen::Index>(p)) = Lv[p] - db;
        out(static_cast<Eigen::Index>(P)) = vmean(dphi);
        return out;
    };

    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        x.setZero(rhs.size());
        return true;
    }
    x.setZero(rhs.size());
    Eigen::VectorXd r = rhs;  // x = 0 start
    Eigen::VectorXd r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd pv = Eigen::VectorXd::Zero(rhs.size());
    for (int it = 0; it < maxit; ++it) {
        const double rho1 = r0.dot(r);
        if (std::abs(rho1) < 1e-300) break;
        if (it == 0) {
            pv = r;
        } else {
            const double beta = (rho1 / rho) * (alpha / omega);
            pv = r + beta * (pv - omega * v);
        }
        rho = rho1;
        const Eigen::VectorXd y = Pc.apply(pv);
        v = apply_full(y);
        alpha = rho / r0.dot(v);
        const Eigen::VectorXd s = r - alpha * v;
        if (s.norm() <= rtol * bnorm) {
            x += alpha * y;
            return true;
        }
        const Eigen::VectorXd z = Pc.apply(s);
        const Eigen::VectorXd t = apply_full(z);
        omega = t.dot(s) / t.dot(t);
        x += alpha * y + omega * z;
        r = s - omega * t;
        if (r.norm() <= rtol * bnorm) return true;
        if (std::abs(omega) < 1e-300) break;
    }
    return false;
}

}  // namespace

HermitianField complex_hessian_field(const ScalarField& phi, const HypercomplexFrame& frame) {
    const TorusGrid& g = *phi.grid;
    if (g.n() != frame.n()) throw std::invalid_argument("complex_hessian_field: frame mismatch");
    const auto d2 = g.second_derivatives(phi.values);
    HermitianField A(frame.n(), g.points());
    for (size_t p = 0; p < g.points(); ++p) hessian_at(d2, p, frame.n(), g.axes(), A.at(p));
    return A;
}

HermitianField quaternionic_hessian_field(const ScalarField& phi, const HypercomplexFrame& frame) {
    HermitianField A = complex_hessian_field(phi, frame);
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    HermitianField out(A.n, A.pts);
    for (size_t p = 0; p < A.pts; ++p)
        out.at(p) = A.at(p) + Jz.transpose() * A.at(p).conjugate() * Jz;
    return out;
}

Eigen::MatrixXcd complex_hessian_from_real(const Eigen::MatrixXd& H,
                                           const HypercomplexFrame& frame) {
    const int m = frame.complex_dim();
    if (H.rows() != frame.real_dim() || H.cols() != frame.real_dim())
        throw std::invalid_argument("complex_hessian_from_real: wrong Hessian size");
    Eigen::MatrixXcd A(m, m);
    for (int i = 0; i < m; ++i) {
        const int pi = 2 * i;
        for (int j = 0; j < m; ++j) {
            const int pj = 2 * j;
            A(i, j) = std::complex<double>(0.25 * (H(pi, pj) + H(pi + 1, pj + 1)),
                                           0.25 * (H(pi, pj + 1) - H(pi + 1, pj)));
        }
    }
    return A;
}

SolveResult solve(const OperatorSpec& spec, const ScalarField& F, const HypercomplexFrame& frame,
                  const SolveOptions& opts) {
    const TorusGrid& grid = *F.grid;
    if (grid.n() != frame.n() || spec.n != frame.n())
        throw std::invalid_argument("solve: dimension mismatch between grid, frame and operator");

    {
        const double range = std::exp(F.max() - F.min());
        if (range > opts.range_guard && !opts.force) {
            std::ostringstream os;
            os << "solve: e^F dynamic range " << range << " exceeds the aliasing guard "
               << opts.range_guard << " (set force to override)";
            throw std::invalid_argument(os.str());
        }
    }

    const size_t P = grid.points();
    ScalarField phi(grid);
    double b = 0.0;

    auto eval = [&](const ScalarField& ph, bool need_all) {
        return evaluate_points(spec, quaternionic_hessian_field(ph, frame), need_all);
    };

    PointEval ev = eval(phi, true);
    if (!ev.in_cone)
        throw SolveFailure("solve: initial iterate outside the cone", 0.0, 0);
    double res = residual_inf(ev, F.values, b);
    SolveResult out;
    out.newton_iters = 0;

    while (res > opts.tol) {
        if (out.newton_iters >= opts.max_iters)
            throw SolveFailure("solve: Newton did not converge in " +
                                   std::to_string(opts.max_iters) + " iterations",
                               res, out.newton_iters);

        double sbar = 0.0;
        const HermitianField hh = quaternionic_hessian_field(phi, frame);
        const LinearizedOperator L = build_linearization(spec, grid, hh, &sbar);
        const Preconditioner Pc{&grid, std::max(sbar, 1e-8)};

        Eigen::VectorXd rhs(P + 1);
        for (size_t p = 0; p < P; ++p)
            rhs(static_cast<Eigen::Index>(p)) = -(ev.logf[p] - F.values[p] - b);
        rhs(static_cast<Eigen::Index>(P)) = 0.0;

        Eigen::VectorXd upd;
        if (!bicgstab(L, Pc, rhs, upd, opts.krylov_tol, opts.krylov_max))
            throw SolveFailure("solve: linearized system did not reach tolerance", res,
                               out.newton_iters);

        // backtracking on the residual sup norm with a cone-membership guard
        double t = 1.0;
        bool accepted = false;
        while (t >= opts.step_floor) {
            ScalarField trial(grid);
            for (size_t p = 0; p < P; ++p)
                trial.values[p] = phi.values[p] + t * upd(static_cast<Eigen::Index>(p));
            const double tb = b + t * upd(static_cast<Eigen::Index>(P));
            PointEval tev = eval(trial, false);
            if (tev.in_cone) {
                const double tres = residual_inf(tev, F.values, tb);
                if (tres <= (1.0 - 1e-4 * t) * res || tres <= opts.tol) {
                    phi = std::move(trial);
                    b = tb;
                    ev = std::move(tev);
                    res = tres;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        ++out.newton_iters;
        if (!accepted)
            throw SolveFailure(
                "solve: line search hit the damping floor (cone boundary or stagnation)", res,
                out.newton_iters);
        if (opts.verbose)
            std::fprintf(stderr, "newton %d: residual %.3e (step %.3g)\n", out.newton_iters, res,
                         t);
    }

    // fix the gauge exactly: mean was kept ~0 by the constraint row, the
    // reported field is shifted to sup phi = 0
    phi.add_constant(-phi.max());
    out.phi = std::move(phi);
    out.b = b;
    out.residual_inf = res;
    out.min_eig_margin = ev.min_margin;
    out.max_pairing_gap = ev.max_pairing_gap;
    return out;
}

L1Report l1_check(const SolveResult& result, const HypercomplexFrame& frame) {
    const int n = frame.n();
    const HermitianField hh = quaternionic_hessian_field(result.phi, frame);
    L1Report rep;
    rep.l1_norm = result.phi.l1();
    rep.trace_margin = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    Eigen::MatrixXcd M(2 * n, 2 * n);
    for (size_t p = 0; p < hh.pts; ++p) {
        M = hh.at(p);
        for (int i = 0; i < 2 * n; ++i) M(i, i) += 1.0;
        es.compute(M, Eigen::EigenvaluesOnly);
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
            tr += 0.5 * (es.eigenvalues()(2 * i) + es.eigenvalues()(2 * i + 1)) - 1.0;
        rep.trace_margin = std::min(rep.trace_margin, tr + n);
    }
    return rep;
}

SolutionCheck verify_solution(const OperatorSpec& spec, const ScalarField& F,
                              const SolveResult& result, const HypercomplexFrame& frame) {
    const int n = frame.n();
    SolutionCheck chk;
    chk.min_cone_margin = std::numeric_limits<double>::infinity();
    const HermitianField A = complex_hessian_field(result.phi, frame);
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    const HyperhermitianForm omega_std = HyperhermitianForm::standard(n);
    const double pf_base = pfaffian(omega_std);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    Eigen::MatrixXcd M(2 * n, 2 * n);
    std::vector<double> lam(static_cast<size_t>(n));
    for (size_t p = 0; p < A.pts; ++p) {
        M = A.at(p) + Jz.transpose() * A.at(p).conjugate() * Jz;
        for (int i = 0; i < 2 * n; ++i) M(i, i) += 1.0;
        es.compute(M, Eigen::EigenvaluesOnly);
        const auto& w = es.eigenvalues();
        const double radius = std::max(w.cwiseAbs().maxCoeff(), 1e-300);
        for (int i = 0; i < n; ++i) {
            chk.max_pairing_gap = std::max(chk.max_pairing_gap, (w(2 * i + 1) - w(2 * i)) / radius);
            lam[static_cast<size_t>(i)] = 0.5 * (w(2 * i) + w(2 * i + 1));
        }
        chk.min_cone_margin = std::min(chk.min_cone_margin, spec.cone_margin(lam));
        const double fb =
            spec.value(lam) * std::exp(-result.b) - std::exp(F.values[p]);
        chk.forward_backward_err = std::max(chk.forward_backward_err, std::abs(fb));

        // Pf(Omega_phi)/Pf(Omega) = prod lambda_i = e^{n(F+b)} on solutions
        const Eigen::MatrixXcd Wphi =
            omega_std.W + quaternionic_hessian_matrix(A.at(p), frame);
        const double ratio = pfaffian(Wphi).real() / pf_base;
        const double target = std::exp(n * (F.values[p] + result.b));
        chk.pf_identity_rel_err =
            std::max(chk.pf_identity_rel_err, std::abs(ratio - target) / std::max(1.0, target));
    }
    return chk;
}

}  // namespace qmalab
