#include "qmalab/selftest.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "qmalab/comparison.hpp"
#include "qmalab/forms.hpp"
#include "qmalab/gp.hpp"
#include "qmalab/operators.hpp"
#include "qmalab/probe.hpp"
#include "qmalab/random.hpp"
#include "qmalab/solver.hpp"
#include "qmalab/wedge.hpp"

namespace qmalab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Check {
    std::string name;
    std::function<bool(std::string&)> fn;
};

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<Check> build_checks() {
    std::vector<Check> checks;
    auto add = [&](std::string name, std::function<bool(std::string&)> fn) {
        checks.push_back({std::move(name), std::move(fn)});
    };

    add("frame: defining identities at n=1,2,3", [](std::string& msg) {
        for (int n : {1, 2, 3}) {
            const auto f = HypercomplexFrame::standard(n);
            if (f.invariant_error() > 1e-12) {
                msg = "invariant error " + std::to_string(f.invariant_error());
                return false;
            }
        }
        return true;
    });

    add("frame: J^2 e0 = -e0 and block direct sum", [](std::string& msg) {
        const auto f1 = HypercomplexFrame::standard(1);
        Eigen::VectorXd e0 = Eigen::VectorXd::Zero(4);
        e0(0) = 1.0;
        if ((f1.J_mat() * (f1.J_mat() * e0) + e0).norm() > 1e-14) {
            msg = "J^2 e0 != -e0";
            return false;
        }
        const auto f2 = HypercomplexFrame::standard(2);
        if ((f2.J_mat().topLeftCorner(4, 4) - f1.J_mat()).norm() > 0 ||
            (f2.J_mat().bottomRightCorner(4, 4) - f1.J_mat()).norm() > 0 ||
            f2.J_mat().topRightCorner(4, 4).norm() > 0) {
            msg = "n=2 frame is not the direct sum of n=1 blocks";
            return false;
        }
        return true;
    });

    add("frame: n = 0 rejected", [](std::string& msg) {
        try {
            HypercomplexFrame::standard(0);
        } catch (const std::invalid_argument&) {
            return true;
        }
        msg = "no exception";
        return false;
    });

    add("decompose: identity -> (Id, Omega_std) with Pf = 1", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(2);
        auto [h, om] = decompose(QuaternionMatrix::identity(2), frame);
        if ((h.A - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-15 ||
            (om.W - HyperhermitianForm::standard(2).W).cwiseAbs().maxCoeff() > 1e-15 ||
            !near(pfaffian(om), 1.0, 1e-14)) {
            msg = "wrong decomposition of the identity";
            return false;
        }
        return true;
    });

    add("decompose: real diagonal -> doubled diagonal and scaled blocks", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(2);
        auto [h, om] = decompose(QuaternionMatrix::real_diagonal({2.0, -3.0}), frame);
        Eigen::VectorXcd want(4);
        want << 2.0, 2.0, -3.0, -3.0;
        if ((h.A - Eigen::MatrixXcd(want.asDiagonal())).cwiseAbs().maxCoeff() > 1e-15) {
            msg = "hermitian part is not the doubled diagonal";
            return false;
        }
        Eigen::MatrixXcd wantW = Eigen::MatrixXcd::Zero(4, 4);
        wantW(0, 1) = 2.0;
        wantW(1, 0) = -2.0;
        wantW(2, 3) = -3.0;
        wantW(3, 2) = 3.0;
        if ((om.W - wantW).cwiseAbs().maxCoeff() > 1e-15) {
            msg = "hyperhermitian part is not block-scaled";
            return false;
        }
        return true;
    });

    add("decompose/recompose: random round trip < 1e-13 (500 trials, n in {1,2,3})",
        [](std::string& msg) {
            Rng rng(20240811);
            for (int t = 0; t < 500; ++t) {
                const int n = 1 + static_cast<int>(t % 3);
                const auto frame = HypercomplexFrame::standard(n);
                const QuaternionMatrix H = random_quaternion_hermitian(n, rng);
                auto [h, om] = decompose(H, frame);
                const QuaternionMatrix back = recompose(h, om, frame);
                if (H.max_abs_diff(back) > 1e-13) {
                    msg = "round-trip error " + std::to_string(H.max_abs_diff(back));
                    return false;
                }
                if (om.antisymmetry_error() > 1e-13 || om.j_reality_error(frame) > 1e-13) {
                    msg = "decomposition output violates form invariants";
                    return false;
                }
            }
            return true;
        });

    add("decompose: non-hermitian rejected with the violating entry", [](std::string& msg) {
        QuaternionMatrix H = QuaternionMatrix::identity(2);
        H.at(0, 1) = Quaternion(1, 2, 3, 4);
        H.at(1, 0) = Quaternion(0, 0, 0, 0);
        try {
            const auto frame = HypercomplexFrame::standard(2);
            decompose(H, frame);
        } catch (const std::invalid_argument& e) {
            if (std::string(e.what()).find("(0, 1)") == std::string::npos) {
                msg = std::string("message lacks the entry index: ") + e.what();
                return false;
            }
            return true;
        }
        msg = "no exception";
        return false;
    });

    add("pfaffian: standard block, multiplicativity, Pf^2 = det", [](std::string& msg) {
        Eigen::MatrixXcd e2(2, 2);
        e2 << 0, 1, -1, 0;
        if (!near(pfaffian(e2).real(), 1.0, 1e-15)) {
            msg = "Pf of the standard block is not 1";
            return false;
        }
        Eigen::MatrixXcd b(4, 4);
        b.setZero();
        b.block(0, 0, 2, 2) = 1.5 * e2;
        b.block(2, 2, 2, 2) = -2.0 * e2;
        if (!near(pfaffian(b).real(), -3.0, 1e-12)) {
            msg = "block multiplicativity failed";
            return false;
        }
        Rng rng(7);
        for (int t = 0; t < 100; ++t) {
            const Eigen::MatrixXcd W = random_antisymmetric(4, rng);
            const std::complex<double> pf = pfaffian(W);
            const std::complex<double> det = W.determinant();
            if (std::abs(pf * pf - det) > 1e-10 * std::max(1.0, std::abs(det))) {
                msg = "Pf^2 != det on a random antisymmetric matrix";
                return false;
            }
        }
        return true;
    });

    add("volume constant: c(1) = 2, product relation at n=2, scale invariance",
        [](std::string& msg) {
            const double c1 = volume_constant(1);
            if (!near(c1, 2.0, 1e-13)) {
                msg = "c(1) = " + std::to_string(c1);
                return false;
            }
            const double c2 = volume_constant(2);
            const double want = c1 * c1 * binom(2, 1) * binom(2, 1) / binom(4, 2);
            if (!near(c2, want, 1e-12)) {
                msg = "c(2) = " + std::to_string(c2) + ", expected " + std::to_string(want);
                return false;
            }
            // scaling t Omega multiplies the top form by t^{2n}, c unchanged
            const auto om = HyperhermitianForm::standard(1);
            const ExteriorForm p1 = ExteriorForm::from_two_form(om.W * 3.0);
            const ExteriorForm lhs = p1.wedge(p1.conjugate());
            if (std::abs(lhs.top_coefficient(4) / 9.0 -
                         ExteriorForm::from_two_form(om.W)
                             .wedge(ExteriorForm::from_two_form(om.W).conjugate())
                             .top_coefficient(4)) > 1e-13) {
                msg = "scaling homogeneity failed";
                return false;
            }
            return true;
        });

    add("positivity: Omega(X, XJ) >= 0 iff associated hermitian PSD", [](std::string& msg) {
        Rng rng(99);
        const auto frame = HypercomplexFrame::standard(2);
        for (int t = 0; t < 50; ++t) {
            const HyperhermitianForm om = random_j_real_form(2, frame, rng);
            const bool psd = om.is_positive(frame, 1e-12);
            double worst = 1e300;
            std::normal_distribution<double> g(0.0, 1.0);
            for (int s = 0; s < 1000; ++s) {
                Eigen::VectorXd X(8);
                for (int i = 0; i < 8; ++i) X(i) = g(rng);
                const auto v = om.pairing(X, frame);
                if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
                    msg = "pairing is not real";
                    return false;
                }
                worst = std::min(worst, v.real());
            }
            const double scale = om.W.cwiseAbs().maxCoeff();
            if (psd && worst < -1e-10 * scale) {
                msg = "PSD avatar but negative pairing";
                return false;
            }
            if (!psd && associated_hermitian(om, frame).min_eigenvalue() < -0.05 * scale &&
                worst > -1e-12 * scale) {
                // clearly indefinite forms must show a negative direction in 1000 samples
                msg = "indefinite avatar but no negative pairing found";
                return false;
            }
        }
        return true;
    });

    add("j_pullback: identity, diag(1,0), involution", [](std::string& msg) {
        const auto f1 = HypercomplexFrame::standard(1);
        const auto id = HermitianForm::identity(1);
        if ((j_pullback(id, f1).A + id.A).cwiseAbs().maxCoeff() > 1e-15) {
            msg = "j_pullback(Id) != -Id";
            return false;
        }
        Eigen::MatrixXcd d(2, 2);
        d << 1, 0, 0, 0;
        const Eigen::MatrixXcd beta = -j_pullback({1, d}, f1).A;
        Eigen::MatrixXcd want(2, 2);
        want << 0, 0, 0, 1;
        if ((beta - want).cwiseAbs().maxCoeff() > 1e-15) {
            msg = "beta(diag(1,0)) != diag(0,1)";
            return false;
        }
        Rng rng(5);
        const HermitianForm a = random_hermitian_form(2, rng);
        const auto f2 = HypercomplexFrame::standard(2);
        const HermitianForm b1 = j_pullback(a, f2);
        const HermitianForm b2 = j_pullback({2, -b1.A}, f2);
        if ((-b2.A - a.A).cwiseAbs().maxCoeff() > 1e-13) {
            msg = "involution failed";
            return false;
        }
        return true;
    });

    add("hyperhermitian part: identity doubles, PSD preserved", [](std::string& msg) {
        const auto f1 = HypercomplexFrame::standard(1);
        if ((hyperhermitian_part(HermitianForm::identity(1), f1).A -
             2.0 * Eigen::MatrixXcd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff() > 1e-15) {
            msg = "hp(Id) != 2 Id";
            return false;
        }
        Eigen::MatrixXcd d(2, 2);
        d << 1, 0, 0, 0;
        if ((hyperhermitian_part({1, d}, f1).A - Eigen::MatrixXcd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff() > 1e-15) {
            msg = "hp(diag(1,0)) != Id";
            return false;
        }
        Rng rng(11);
        const auto f2 = HypercomplexFrame::standard(2);
        for (int t = 0; t < 200; ++t) {
            const HermitianForm a = random_psd_form(2, rng);
            const double lo_a = a.min_eigenvalue();
            const double lo_hp = hyperhermitian_part(a, f2).min_eigenvalue();
            if (lo_hp < lo_a - 1e-10 * std::max(1.0, std::abs(a.A.trace().real()))) {
                msg = "hp lost positivity";
                return false;
            }
        }
        return true;
    });

    add("lemma 3.1: identity and zero cases, 1000 random PSD at n=1,2", [](std::string& msg) {
        const auto f1 = HypercomplexFrame::standard(1);
        const auto rep = check_lemma31(HermitianForm::identity(1), f1);
        if (!near(rep.lhs_det, 4.0, 1e-13) || !near(rep.rhs_det, 1.0, 1e-13) ||
            !near(rep.margin, 3.0, 1e-13)) {
            msg = "identity case: lhs/rhs/margin wrong";
            return false;
        }
        const auto zero = check_lemma31({1, Eigen::MatrixXcd::Zero(2, 2)}, f1);
        if (zero.lhs_det != 0.0 || zero.rhs_det != 0.0 || zero.margin != 0.0) {
            msg = "zero form is not an equality case";
            return false;
        }
        Rng rng(31);
        for (int n : {1, 2}) {
            const auto fr = HypercomplexFrame::standard(n);
            for (int t = 0; t < 1000; ++t) {
                const auto r = check_lemma31(random_psd_form(n, rng), fr);
                if (!r.holds(1e-10)) {
                    msg = "margin " + std::to_string(r.margin) + " at n=" + std::to_string(n);
                    return false;
                }
            }
        }
        return true;
    });

    add("prop 3.2: ratio 2^{2n} at the identity, 1000 random PSD with Pfaffian route",
        [](std::string& msg) {
            for (int n : {1, 2}) {
                const auto fr = HypercomplexFrame::standard(n);
                const auto rep = check_prop32(HermitianForm::identity(n), fr);
                if (!near(rep.quat_side / rep.complex_side, std::pow(2.0, 2 * n), 1e-10)) {
                    msg = "identity ratio wrong at n=" + std::to_string(n);
                    return false;
                }
            }
            const auto f1 = HypercomplexFrame::standard(1);
            const auto zero = check_prop32({1, Eigen::MatrixXcd::Zero(2, 2)}, f1);
            if (zero.quat_side != 0.0 || zero.complex_side != 0.0) {
                msg = "zero Hessian is not an equality case";
                return false;
            }
            Rng rng(32);
            for (int n : {1, 2}) {
                const auto fr = HypercomplexFrame::standard(n);
                for (int t = 0; t < 1000; ++t) {
                    const auto r = check_prop32(random_psd_form(n, rng), fr);
                    if (!r.holds(1e-10) || r.pfaffian_rel_err > 1e-9) {
                        msg = "margin or Pfaffian cross-check failed at n=" + std::to_string(n);
                        return false;
                    }
                }
            }
            return true;
        });

    add("qma operator: normalization, geometric mean, Euler relation", [](std::string& msg) {
        const auto q2 = qma_operator(2);
        if (!near(q2.evaluate({1.0, 1.0}), 1.0, 1e-15) || !near(q2.evaluate({4.0, 1.0}), 2.0, 1e-14)) {
            msg = "values wrong";
            return false;
        }
        Rng rng(41);
        std::uniform_real_distribution<double> u(0.1, 10.0);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> lam = {u(rng), u(rng)};
            const auto g = q2.grad_checked(lam);
            const double euler = lam[0] * g[0] + lam[1] * g[1];
            const double f = q2.evaluate(lam);
            if (std::abs(euler - f) > 1e-10 * f) {
                msg = "Euler relation off";
                return false;
            }
        }
        try {
            q2.evaluate({1.0, -1.0});
            msg = "point outside the cone accepted";
            return false;
        } catch (const std::domain_error&) {
        }
        return true;
    });

    add("structural checks: qma/laplace pass, max-operator produces a witness",
        [](std::string& msg) {
            const auto rep = check_structural(qma_operator(2), 1000, 7);
            if (!rep.ok() || rep.min_product < 0.25 * (1.0 - 1e-8)) {
                msg = "qma(2) structural check failed";
                return false;
            }
            const auto lap = check_structural(laplace_operator(2), 1000, 8);
            if (!lap.ok() || !near(lap.min_product, 0.25, 1e-12)) {
                msg = "laplace(2) structural check failed";
                return false;
            }
            const auto bad = check_structural(max_eigenvalue_operator(2), 1000, 9);
            if (bad.ok() || !bad.violation.has_value()) {
                msg = "negative control did not fail";
                return false;
            }
            return true;
        });

    add("linearization coefficients: symmetric point, (4,1), finite differences",
        [](std::string& msg) {
            const auto q2 = qma_operator(2);
            auto w = linearization_coeffs(q2, {1.0, 1.0});
            if (!near(w[0], 0.5, 1e-14) || !near(w[1], 0.5, 1e-14)) {
                msg = "coefficients at the symmetric point wrong";
                return false;
            }
            w = linearization_coeffs(q2, {4.0, 1.0});
            if (!near(w[0], 0.125, 1e-13) || !near(w[1], 0.5, 1e-13)) {
                msg = "coefficients at (4,1) wrong";
                return false;
            }
            Rng rng(42);
            std::uniform_real_distribution<double> u(0.2, 5.0);
            for (int t = 0; t < 100; ++t) {
                std::vector<double> lam = {u(rng), u(rng)};
                const auto coeffs = linearization_coeffs(q2, lam);
                const double h = 1e-6;
                for (size_t i = 0; i < 2; ++i) {
                    auto lp = lam, lm = lam;
                    lp[i] += h;
                    lm[i] -= h;
                    const double fd =
                        (std::log(q2.evaluate(lp)) - std::log(q2.evaluate(lm))) / (2 * h);
                    if (std::abs(fd - coeffs[i]) > 1e-6 * std::abs(coeffs[i])) {
                        msg = "finite-difference disagreement";
                        return false;
                    }
                }
            }
            return true;
        });

    add("pencil eigenvalues: identity, diagonal scaling, independent solver",
        [](std::string& msg) {
            const auto frame = HypercomplexFrame::standard(2);
            const auto om = HyperhermitianForm::standard(2);
            auto e = eigenvalues(om, om, frame);
            if (!near(e.lambda[0], 1.0, 1e-12) || !near(e.lambda[1], 1.0, 1e-12)) {
                msg = "identity pencil wrong";
                return false;
            }
            HyperhermitianForm scaled(2, om.W);
            scaled.W.block(0, 0, 2, 2) *= 3.0;
            scaled.W.block(2, 2, 2, 2) *= 0.5;
            e = eigenvalues(scaled, om, frame);
            if (!near(e.lambda[0], 3.0, 1e-12) || !near(e.lambda[1], 0.5, 1e-12)) {
                msg = "diagonal scaling wrong";
                return false;
            }
            Rng rng(52);
            for (int t = 0; t < 100; ++t) {
                const HyperhermitianForm pert = random_j_real_form(2, frame, rng);
                const EigTuple et = eigenvalues(pert, om, frame);
                // independent route: unsymmetric solve of h^{-1} h_phi
                const Eigen::MatrixXcd h = associated_hermitian(om, frame).A;
                const Eigen::MatrixXcd hp = associated_hermitian(pert, frame).A;
                Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(h.inverse() * hp);
                std::vector<double> all;
                for (int i = 0; i < 4; ++i) {
                    if (std::abs(ces.eigenvalues()(i).imag()) > 1e-8) {
                        msg = "independent route produced complex eigenvalues";
                        return false;
                    }
                    all.push_back(ces.eigenvalues()(i).real());
                }
                std::sort(all.begin(), all.end());
                for (int i = 0; i < 2; ++i) {
                    const double dedup = 0.5 * (all[2 * i] + all[2 * i + 1]);
                    if (std::abs(dedup - et.lambda[static_cast<size_t>(1 - i)]) >
                        1e-8 * std::max(1.0, std::abs(dedup))) {
                        msg = "mismatch with the independent eigensolver";
                        return false;
                    }
                }
                if (et.pairing_gap_rel > 1e-8) {
                    msg = "pairing gap too large";
                    return false;
                }
            }
            return true;
        });

    add("hessian field: zero field, band-limited exactness, quadratic patch",
        [](std::string& msg) {
            const auto frame = HypercomplexFrame::standard(1);
            TorusGrid grid(1, 8);
            ScalarField zero(grid);
            const auto hz = quaternionic_hessian_field(zero, frame);
            for (size_t p = 0; p < hz.pts; ++p)
                if (hz.at(p).cwiseAbs().maxCoeff() != 0.0) {
                    msg = "zero field has nonzero Hessian";
                    return false;
                }

            TorusGrid g16(1, 16);
            ScalarField cosf(g16);
            std::vector<int> idx(4);
            for (size_t p = 0; p < g16.points(); ++p) {
                g16.unflatten(p, idx.data());
                cosf.values[p] = 0.25 * std::cos(kTwoPi * g16.coord(idx[0]));
            }
            const auto d2 = g16.second_derivatives(cosf.values);
            double worst = 0.0;
            for (size_t p = 0; p < g16.points(); ++p) {
                g16.unflatten(p, idx.data());
                const double want = -0.25 * kTwoPi * kTwoPi * std::cos(kTwoPi * g16.coord(idx[0]));
                worst = std::max(worst,
                                 std::abs(d2[TorusGrid::pair_index(0, 0, 4)][p] - want));
            }
            if (worst > 1e-10) {
                msg = "spectral second derivative error " + std::to_string(worst);
                return false;
            }

            // non-periodic direct path: phi = sum c_a |q_a|^2 / 2
            const auto f2 = HypercomplexFrame::standard(2);
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(8, 8);
            const double c0 = 0.7, c1 = -0.2;
            for (int i = 0; i < 4; ++i) H(i, i) = c0;
            for (int i = 4; i < 8; ++i) H(i, i) = c1;
            const Eigen::MatrixXcd A = complex_hessian_from_real(H, f2);
            const Eigen::MatrixXcd Jz = f2.j_complex().cast<std::complex<double>>();
            Eigen::MatrixXcd hh = A + Jz.transpose() * A.conjugate() * Jz;
            const EigTuple et = paired_eigenvalues(hh + Eigen::MatrixXcd::Identity(4, 4));
            if (!near(et.lambda[0], 1.0 + c0, 1e-13) || !near(et.lambda[1], 1.0 + c1, 1e-13)) {
                msg = "quadratic patch eigenvalues wrong";
                return false;
            }
            return true;
        });

    add("solve: F = 0 gives phi = 0, b = 0", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(1);
        TorusGrid grid(1, 8);
        ScalarField F(grid);
        const auto res = solve(qma_operator(1), F, frame);
        if (res.phi.max_abs() > 1e-12 || std::abs(res.b) > 1e-12 || res.newton_iters != 0) {
            msg = "trivial instance not solved exactly";
            return false;
        }
        return true;
    });

    add("solve: n=1, N=16, F = 0.1 cos(2 pi x0) self-consistency", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(1);
        TorusGrid grid(1, 16);
        ScalarField F(grid);
        std::vector<int> idx(4);
        for (size_t p = 0; p < grid.points(); ++p) {
            grid.unflatten(p, idx.data());
            F.values[p] = 0.1 * std::cos(kTwoPi * grid.coord(idx[0]));
        }
        const auto spec = qma_operator(1);
        const auto res = solve(spec, F, frame);
        if (res.residual_inf > 1e-8 || res.newton_iters > 30) {
            msg = "did not converge within budget";
            return false;
        }
        if (res.phi.max() != 0.0) {
            msg = "sup phi != 0";
            return false;
        }
        const auto chk = verify_solution(spec, F, res, frame);
        if (chk.forward_backward_err > 1e-7 || chk.min_cone_margin <= 0.0) {
            msg = "forward-backward error " + std::to_string(chk.forward_backward_err);
            return false;
        }
        return true;
    });

    add("solve: continuation in t approaches the endpoint monotonically", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(1);
        TorusGrid grid(1, 12);
        ScalarField F(grid);
        std::vector<int> idx(4);
        for (size_t p = 0; p < grid.points(); ++p) {
            grid.unflatten(p, idx.data());
            F.values[p] = 0.3 * std::cos(kTwoPi * grid.coord(idx[0])) +
                          0.1 * std::sin(kTwoPi * grid.coord(idx[1]));
        }
        const auto spec = qma_operator(1);
        std::vector<ScalarField> sols;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            ScalarField Ft(grid);
            for (size_t p = 0; p < grid.points(); ++p) Ft.values[p] = t * F.values[p];
            sols.push_back(solve(spec, Ft, frame).phi);
        }
        auto dist = [](const ScalarField& a, const ScalarField& b) {
            double m = 0.0;
            for (size_t p = 0; p < a.values.size(); ++p)
                m = std::max(m, std::abs(a.values[p] - b.values[p]));
            return m;
        };
        for (size_t j = 0; j + 2 < sols.size(); ++j) {
            if (dist(sols[j], sols.back()) <= dist(sols[j + 1], sols.back())) {
                msg = "distance to the endpoint solution is not decreasing";
                return false;
            }
        }
        return true;
    });

    add("l1_check: cone trace bound holds on a solved instance", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(1);
        TorusGrid grid(1, 12);
        ScalarField F(grid);
        std::vector<int> idx(4);
        for (size_t p = 0; p < grid.points(); ++p) {
            grid.unflatten(p, idx.data());
            F.values[p] = 0.2 * std::cos(kTwoPi * grid.coord(idx[0]));
        }
        const auto res = solve(qma_operator(1), F, frame);
        const auto rep = l1_check(res, frame);
        if (!(rep.trace_margin >= 0.0) || !(rep.l1_norm >= 0.0)) {
            msg = "trace margin negative";
            return false;
        }
        ScalarField zero(grid);
        const auto res0 = solve(qma_operator(1), zero, frame);
        if (l1_check(res0, frame).l1_norm != 0.0) {
            msg = "phi = 0 has nonzero L1 norm";
            return false;
        }
        return true;
    });

    add("tau family: closed forms, limit rate, monotone in k", [](std::string& msg) {
        for (double k : {1.0, 10.0, 100.0}) {
            if (!near(tau(k, 0.0), 0.5 / k, 1e-15)) {
                msg = "tau_k(0) != 1/(2k)";
                return false;
            }
            if (std::abs(tau(k, 1.0) - 1.0) > 0.25 / (k * k)) {
                msg = "tau_k(1) converges too slowly";
                return false;
            }
        }
        if (!(tau(1, -1.0) > tau(10, -1.0) && tau(10, -1.0) > tau(100, -1.0) &&
              tau(100, -1.0) > 0.0)) {
            msg = "not monotone decreasing in k at x = -1";
            return false;
        }
        return true;
    });

    add("u_s: closed form for constant phi, sublevel monotone in s", [](std::string& msg) {
        const BallModel ball(1, 0.25, 257);
        const auto inst = constant_radial_instance(ball);
        const double sp = 0.5 * ball.r * ball.r;
        const auto u = u_s_profile(inst, sp);
        for (size_t j = 0; j < u.size(); ++j)
            if (!near(u[j], 0.5 * inst.s[j] - sp, 1e-15)) {
                msg = "u_s is not s/2 - s_param";
                return false;
            }
        // sublevel sets nested over s
        size_t prev = 0;
        for (double f : {0.2, 0.5, 0.9}) {
            const auto uu = u_s_profile(inst, f * ball.r * ball.r);
            size_t count = 0;
            for (double v : uu) count += v < 0.0 ? 1 : 0;
            if (count < prev) {
                msg = "B_s not monotone in s";
                return false;
            }
            prev = count;
        }
        return true;
    });

    add("mass A: closed form, positivity limit, monotone in k", [](std::string& msg) {
        const BallModel ball(1, 0.25, 4097);
        const auto inst = constant_radial_instance(ball);
        const double sp = 0.5 * ball.r * ball.r;
        const double closed = 4.0 * std::pow(std::numbers::pi, 2) / 3.0 * std::pow(sp, 3);
        const double limit = mass_A(inst, sp, std::numeric_limits<double>::infinity());
        if (std::abs(limit - closed) > 1e-8 * closed) {
            msg = "A_s closed form mismatch: " + std::to_string(limit) + " vs " +
                  std::to_string(closed);
            return false;
        }
        double prev = std::numeric_limits<double>::infinity();
        double prev_diff = std::numeric_limits<double>::infinity();
        for (double k : {1.0, 10.0, 100.0, 1000.0}) {
            const double a = mass_A(inst, sp, k);
            if (a >= prev) {
                msg = "A_{s,k} not decreasing in k";
                return false;
            }
            const double diff = a - limit;
            if (diff < -1e-12 || diff >= prev_diff) {
                msg = "A_{s,k} differences not decreasing";
                return false;
            }
            prev = a;
            prev_diff = diff;
        }
        return true;
    });

    add("radial oracle: constant rhs closed form, zero rhs, unit mass", [](std::string& msg) {
        for (int m : {2, 4}) {
            const double c = 1.7;
            const auto sol = radial_cma_dirichlet([c](double) { return c; }, m, 0.25, 513);
            const double up = std::pow(c, 1.0 / m);
            for (size_t j = 0; j < sol.s.size(); ++j) {
                if (std::abs(sol.uprime[j] - up) > 1e-10 ||
                    std::abs(sol.psi[j] - up * (sol.s[j] - 0.25)) > 1e-10) {
                    msg = "constant-rhs closed form violated at m=" + std::to_string(m);
                    return false;
                }
            }
        }
        const auto zero = radial_cma_dirichlet([](double) { return 0.0; }, 2, 0.25, 257);
        for (size_t j = 0; j < zero.s.size(); ++j)
            if (zero.psi[j] != 0.0) {
                msg = "zero rhs does not give psi = 0";
                return false;
            }
        // normalized input reproduces unit Monge-Ampere mass
        auto g0 = [](double s) { return 1.0 + 10.0 * s + std::sin(8.0 * s) * std::sin(8.0 * s); };
        const int nodes = 1025;
        const double S = 0.25;
        const double Z = ma_mass_of_density(g0, 2, S, nodes - 1);
        auto g = [&](double s) { return g0(s) / Z; };
        const auto sol = radial_cma_dirichlet(g, 2, S, nodes);
        if (std::abs(ma_mass(sol, 2) - 1.0) > 1e-8) {
            msg = "unit mass violated: " + std::to_string(ma_mass(sol, 2));
            return false;
        }
        // plurisubharmonicity on the grid
        const double h = sol.s[1] - sol.s[0];
        for (size_t j = 1; j + 1 < sol.s.size(); ++j) {
            const double upp = (sol.uprime[j + 1] - sol.uprime[j - 1]) / (2 * h);
            if (sol.uprime[j] < -1e-12 || sol.uprime[j] + sol.s[j] * upp < -1e-6) {
                msg = "radial solution is not plurisubharmonic";
                return false;
            }
        }
        return true;
    });

    add("claim: trivial and scaling cases", [](std::string& msg) {
        const BallModel ball(1, 0.25, 257);
        const auto inst = constant_radial_instance(ball);
        // u >= 0 everywhere -> C = 0
        std::vector<double> upos(inst.s.size(), 1.0), psi(inst.s.size(), -1.0);
        const auto rep0 = verify_claim(inst.s, upos, psi, 1.0, 1);
        if (rep0.C_empirical != 0.0 || rep0.active_nodes != 0) {
            msg = "empty sublevel set should give C = 0";
            return false;
        }
        const auto u = u_s_profile(inst, 0.5 * ball.r * ball.r);
        std::vector<double> psi2(inst.s.size());
        for (size_t j = 0; j < psi2.size(); ++j) psi2[j] = 0.3 * (inst.s[j] - inst.s.back());
        const auto r1 = verify_claim(inst.s, u, psi2, 2.0, 1);
        const auto r2 = verify_claim(inst.s, u, psi2, 4.0, 1);
        if (std::abs(r1.C_empirical - 2.0 * r2.C_empirical) > 1e-12 * r1.C_empirical) {
            msg = "doubling A_sk must halve C exactly";
            return false;
        }
        return true;
    });

    add("gp sweep: model pipeline finite with exact 1/A scaling", [](std::string& msg) {
        const BallModel ball(1, 0.25, 513);
        auto inst = constant_radial_instance(ball);
        const auto rows = gp_claim_sweep(inst, {0.25, 0.5, 1.0}, {10.0, 100.0});
        for (const auto& r : rows) {
            if (!std::isfinite(r.C_empirical) || r.C_empirical <= 0.0 || r.min_margin <= 0.0) {
                msg = "sweep row not finite/positive";
                return false;
            }
        }
        // rescale the rhs: A doubles, C halves, psi unchanged
        auto scaled = inst;
        for (double& v : scaled.rhs_exp) v *= 2.0;
        const auto rows2 = gp_claim_sweep(scaled, {0.5}, {10.0});
        const auto base = gp_claim_sweep(inst, {0.5}, {10.0});
        const double ratioA = rows2[0].A_sk / base[0].A_sk;
        const double ratioC = base[0].C_empirical / rows2[0].C_empirical;
        if (std::abs(ratioA - 2.0) > 1e-12 || std::abs(ratioC - 2.0) > 1e-9) {
            msg = "exact 1/A scaling violated";
            return false;
        }
        return true;
    });

    add("entropy norm: zero, constant, refinement oracle", [](std::string& msg) {
        TorusGrid grid(1, 8);
        ScalarField F(grid);
        if (norm_entropy(F, 3.0) != 0.0) {
            msg = "entropy of F = 0 is not 0";
            return false;
        }
        const double c = 0.37;
        F.values.assign(F.values.size(), c);
        const double want = std::pow(2.0 * c, 3.0) * std::exp(2.0 * c);
        if (std::abs(norm_entropy(F, 3.0) - want) > 1e-14) {
            msg = "constant entropy norm wrong";
            return false;
        }
        RhsFamily fam;
        fam.name = "bump";
        fam.sigma = 0.25;
        fam.amplitude = 1.0;
        TorusGrid coarse(1, 12), fine(1, 24);
        const double a = norm_entropy(make_rhs(coarse, fam), 3.0);
        const double b = norm_entropy(make_rhs(fine, fam), 3.0);
        if (std::abs(a - b) > 1e-4 * std::max(1e-12, std::abs(b))) {
            msg = "coarse/fine quadrature mismatch " + std::to_string(std::abs(a - b) / b);
            return false;
        }
        return true;
    });

    add("probe: constant family with fixed Lq gives -inf phi = 0", [](std::string& msg) {
        const auto frame = HypercomplexFrame::standard(1);
        ProbeConfig cfg;
        cfg.N = 8;
        cfg.family.name = "constant";
        cfg.sigmas = {0.4, 0.2};
        cfg.mode = NormalizeMode::fix_lq;
        cfg.q = 3.0;
        cfg.target = 1.5;
        cfg.workers = 2;
        const auto rep = run_probe(cfg, frame);
        if (rep.rows.size() != 2 || !rep.flagged.empty()) {
            msg = "probe rows missing";
            return false;
        }
        for (const auto& r : rep.rows)
            if (r.neg_inf_phi > 1e-9) {
                msg = "-inf phi not zero for the constant family";
                return false;
            }
        return true;
    });

    add("probe: raw amplitude doubling increases entropy norm and -inf phi",
        [](std::string& msg) {
            const auto frame = HypercomplexFrame::standard(1);
            TorusGrid grid(1, 12);
            double prev_norm = -1.0, prev_inf = -1.0;
            for (double amp : {0.5, 1.0, 2.0}) {
                RhsFamily fam;
                fam.name = "bump";
                fam.sigma = 0.25;
                fam.amplitude = amp;
                const ScalarField F = make_rhs(grid, fam);
                const double ent = norm_entropy(F, 3.0);
                const auto res = solve(qma_operator(1), F, frame);
                const double ninf = -res.phi.min();
                if (ent <= prev_norm || ninf <= prev_inf) {
                    msg = "monotone trend violated";
                    return false;
                }
                prev_norm = ent;
                prev_inf = ninf;
            }
            return true;
        });

    return checks;
}

}  // namespace

int run_selftest(std::ostream& out) {
    const auto checks = build_checks();
    int failures = 0;
    for (const auto& c : checks) {
        std::string msg;
        bool ok = false;
        try {
            ok = c.fn(msg);
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        out << (ok ? "[PASS] " : "[FAIL] ") << c.name;
        if (!ok && !msg.empty()) out << " -- " << msg;
        out << "\n";
        if (!ok) ++failures;
    }
    out << checks.size() - static_cast<size_t>(failures) << "/" << checks.size()
        << " selftest checks passed\n";
    return failures;
}

}  // namespace qmalab
