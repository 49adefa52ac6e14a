#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmalab/comparison.hpp"
#include "qmalab/solver.hpp"

using namespace qmalab;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField cosine_rhs(const TorusGrid& grid, double amp, int axis) {
    ScalarField F(grid);
    std::vector<int> idx(static_cast<size_t>(grid.axes()));
    for (size_t p = 0; p < grid.points(); ++p) {
        grid.unflatten(p, idx.data());
        F.values[p] = amp * std::cos(kTwoPi * grid.coord(idx[static_cast<size_t>(axis)]));
    }
    return F;
}
}  // namespace

TEST_CASE("torus grid: validation and multipliers") {
    CHECK_THROWS_AS(TorusGrid(1, 7), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(1, 6), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(0, 8), std::invalid_argument);
    TorusGrid g(1, 8);
    CHECK(g.points() == 4096);
    CHECK(g.wavenumber(0) == 0);
    CHECK(g.wavenumber(4) == 4);
    CHECK(g.wavenumber(5) == -3);
}

TEST_CASE("spectral second derivatives are exact on band-limited data") {
    TorusGrid g(1, 16);
    ScalarField f(g);
    std::vector<int> idx(4);
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        const double x0 = g.coord(idx[0]), x2 = g.coord(idx[2]);
        f.values[p] = 0.3 * std::cos(kTwoPi * x0) + 0.2 * std::sin(kTwoPi * x0) * std::cos(kTwoPi * x2);
    }
    const auto d2 = g.second_derivatives(f.values);
    double worst00 = 0.0, worst02 = 0.0, worst11 = 0.0;
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        const double x0 = g.coord(idx[0]), x2 = g.coord(idx[2]);
        const double want00 = -kTwoPi * kTwoPi *
                              (0.3 * std::cos(kTwoPi * x0) +
                               0.2 * std::sin(kTwoPi * x0) * std::cos(kTwoPi * x2));
        const double want02 = -kTwoPi * kTwoPi * 0.2 * std::cos(kTwoPi * x0) * std::sin(kTwoPi * x2);
        worst00 = std::max(worst00, std::abs(d2[TorusGrid::pair_index(0, 0, 4)][p] - want00));
        worst02 = std::max(worst02, std::abs(d2[TorusGrid::pair_index(0, 2, 4)][p] - want02));
        worst11 = std::max(worst11, std::abs(d2[TorusGrid::pair_index(1, 1, 4)][p]));
    }
    CHECK(worst00 < 1e-10);
    CHECK(worst02 < 1e-10);
    CHECK(worst11 < 1e-10);
}

TEST_CASE("trig interpolation reproduces grid values and band-limited fields") {
    TorusGrid g(1, 8);
    ScalarField f(g);
    std::vector<int> idx(4);
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        f.values[p] = std::sin(kTwoPi * g.coord(idx[1])) + 0.5 * std::cos(kTwoPi * g.coord(idx[3]));
    }
    Eigen::MatrixXd pts(3, 4);
    pts << 0.125, 0.43, 0.77, 0.06,
           0.0, 0.0, 0.0, 0.0,
           0.9, 0.21, 0.5, 0.33;
    const auto vals = g.interpolate(f.values, pts);
    for (int r = 0; r < 3; ++r) {
        const double want = std::sin(kTwoPi * pts(r, 1)) + 0.5 * std::cos(kTwoPi * pts(r, 3));
        CHECK(vals[static_cast<size_t>(r)] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("poisson solve inverts the spectral laplacian") {
    TorusGrid g(1, 8);
    std::vector<double> rhs(g.points());
    std::vector<int> idx(4);
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        rhs[p] = std::cos(kTwoPi * g.coord(idx[0]));
    }
    const auto u = g.poisson_solve(rhs);
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        const double want = -std::cos(kTwoPi * g.coord(idx[0])) / (kTwoPi * kTwoPi);
        CHECK(u[p] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("quaternionic hessian field: zero and quadratic-patch oracles") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 8);
    ScalarField zero(g);
    const auto hz = quaternionic_hessian_field(zero, frame);
    for (size_t p = 0; p < hz.pts; ++p) CHECK(hz.at(p).cwiseAbs().maxCoeff() == 0.0);

    // non-periodic path: phi = sum_a (c_a/2) |q_a|^2 has perturbation
    // eigenvalues exactly (c_1, ..., c_n)
    const auto f2 = HypercomplexFrame::standard(2);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 4; ++i) H(i, i) = 1.3;
    for (int i = 4; i < 8; ++i) H(i, i) = 0.4;
    const Eigen::MatrixXcd A = complex_hessian_from_real(H, f2);
    const Eigen::MatrixXcd Jz = f2.j_complex().cast<std::complex<double>>();
    const Eigen::MatrixXcd hh = A + Jz.transpose() * A.conjugate() * Jz;
    const EigTuple et = paired_eigenvalues(hh + Eigen::MatrixXcd::Identity(4, 4));
    CHECK(et.lambda[0] == doctest::Approx(1.0 + 1.3).epsilon(1e-14));
    CHECK(et.lambda[1] == doctest::Approx(1.0 + 0.4).epsilon(1e-14));
}

TEST_CASE("hessian field matches the analytic Hessian of a cosine") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 16);
    const ScalarField F = cosine_rhs(g, 0.05, 0);
    const auto A = complex_hessian_field(F, frame);
    std::vector<int> idx(4);
    double worst = 0.0;
    for (size_t p = 0; p < A.pts; ++p) {
        g.unflatten(p, idx.data());
        const double d00 = -0.05 * kTwoPi * kTwoPi * std::cos(kTwoPi * g.coord(idx[0]));
        worst = std::max(worst, std::abs(A.at(p)(0, 0).real() - 0.25 * d00));
        worst = std::max(worst, std::abs(A.at(p)(1, 1).real()));
        worst = std::max(worst, std::abs(A.at(p)(0, 1)));
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("solve: trivial rhs gives the zero solution") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 8);
    ScalarField F(g);
    const auto res = solve(qma_operator(1), F, frame);
    CHECK(res.phi.max_abs() == 0.0);
    CHECK(res.b == 0.0);
    CHECK(res.newton_iters == 0);
    CHECK(res.min_eig_margin == doctest::Approx(1.0));
}

TEST_CASE("solve: cosine instance converges with full diagnostics") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 16);
    const ScalarField F = cosine_rhs(g, 0.1, 0);
    const auto spec = qma_operator(1);
    const auto res = solve(spec, F, frame);
    CHECK(res.residual_inf <= 1e-8);
    CHECK(res.newton_iters <= 30);
    CHECK(res.phi.max() == 0.0);
    CHECK(res.min_eig_margin > 0.0);
    CHECK(res.max_pairing_gap < 1e-8);

    const auto chk = verify_solution(spec, F, res, frame);
    CHECK(chk.forward_backward_err <= 1e-7);
    CHECK(chk.min_cone_margin > 0.0);
    CHECK(chk.max_pairing_gap < 1e-8);
    CHECK(chk.pf_identity_rel_err < 1e-6);

    // b for the n=1 equation is fixed by the mean of e^F
    double mean_exp = 0.0;
    for (double v : F.values) mean_exp += std::exp(v);
    mean_exp /= double(F.values.size());
    CHECK(res.b == doctest::Approx(-std::log(mean_exp)).epsilon(1e-9));

    const auto rep = l1_check(res, frame);
    CHECK(rep.trace_margin >= 0.0);
    CHECK(rep.l1_norm > 0.0);
}

TEST_CASE("solve: laplace operator on the same instance") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 12);
    const ScalarField F = cosine_rhs(g, 0.15, 1);
    const auto res = solve(laplace_operator(1), F, frame);
    CHECK(res.residual_inf <= 1e-8);
    const auto chk = verify_solution(laplace_operator(1), F, res, frame);
    CHECK(chk.forward_backward_err <= 1e-7);
}

TEST_CASE("solve: prop 3.2 margin holds where the perturbed complex Hessian is PSD") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 12);
    const ScalarField F = cosine_rhs(g, 0.2, 0);
    const auto res = solve(qma_operator(1), F, frame);
    const auto A = complex_hessian_field(res.phi, frame);
    size_t checked = 0;
    for (size_t p = 0; p < A.pts; p += 7) {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(2, 2) + 2.0 * A.at(p);
        const HermitianForm form{1, M};
        if (!form.is_psd(1e-12)) continue;
        ++checked;
        const auto rep = check_prop32(form, frame);
        CHECK(rep.margin >= -1e-8 * std::max(1.0, rep.complex_side));
    }
    CHECK(checked > 0);
}

TEST_CASE("solve: grid refinement changes -inf phi by less than 1 percent") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid coarse(1, 12), fine(1, 24);
    const ScalarField Fc = cosine_rhs(coarse, 0.1, 0);
    const ScalarField Ff = cosine_rhs(fine, 0.1, 0);
    const double a = -solve(qma_operator(1), Fc, frame).phi.min();
    const double b = -solve(qma_operator(1), Ff, frame).phi.min();
    CHECK(std::abs(a - b) < 0.01 * std::max(a, b));
}

TEST_CASE("solve: continuation in t gives a continuous path") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 12);
    const ScalarField F = cosine_rhs(g, 0.4, 0);
    const auto spec = qma_operator(1);
    std::vector<ScalarField> path;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        ScalarField Ft(g);
        for (size_t p = 0; p < g.points(); ++p) Ft.values[p] = t * F.values[p];
        path.push_back(solve(spec, Ft, frame).phi);
    }
    auto dist = [](const ScalarField& a, const ScalarField& b) {
        double m = 0.0;
        for (size_t p = 0; p < a.values.size(); ++p)
            m = std::max(m, std::abs(a.values[p] - b.values[p]));
        return m;
    };
    // approaching the endpoint from either side shrinks the gap monotonically
    for (size_t j = 0; j + 2 < path.size(); ++j)
        CHECK(dist(path[j], path.back()) > dist(path[j + 1], path.back()));
    for (size_t j = path.size() - 1; j >= 2; --j)
        CHECK(dist(path[j], path.front()) > dist(path[j - 1], path.front()));
}

TEST_CASE("solve: guards and failure modes") {
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid g(1, 8);
    // dynamic range guard
    ScalarField big(g);
    std::vector<int> idx(4);
    for (size_t p = 0; p < g.points(); ++p) {
        g.unflatten(p, idx.data());
        big.values[p] = 8.0 * std::cos(kTwoPi * g.coord(idx[0]));
    }
    CHECK_THROWS_AS(solve(qma_operator(1), big, frame), std::invalid_argument);

    // iteration budget exhaustion surfaces as SolveFailure with diagnostics
    const ScalarField F = cosine_rhs(g, 0.3, 0);
    SolveOptions opts;
    opts.max_iters = 1;
    opts.tol = 1e-14;
    try {
        solve(qma_operator(1), F, frame, opts);
        CHECK(false);
    } catch (const SolveFailure& e) {
        CHECK(e.iters <= 1);
        CHECK(e.last_residual > 0.0);
    }
}

TEST_CASE("upsample embeds the coarse solution spectrally") {
    TorusGrid coarse(1, 8), fine(1, 16);
    ScalarField f(coarse);
    std::vector<int> idx(4);
    for (size_t p = 0; p < coarse.points(); ++p) {
        coarse.unflatten(p, idx.data());
        f.values[p] = std::cos(kTwoPi * coarse.coord(idx[0])) * std::sin(kTwoPi * coarse.coord(idx[2]));
    }
    const auto up = coarse.upsample(f.values, fine);
    for (size_t p = 0; p < fine.points(); ++p) {
        fine.unflatten(p, idx.data());
        const double want =
            std::cos(kTwoPi * fine.coord(idx[0])) * std::sin(kTwoPi * fine.coord(idx[2]));
        CHECK(up[p] == doctest::Approx(want).epsilon(1e-11));
    }
}
