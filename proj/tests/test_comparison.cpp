#include <doctest.h>

#include <cmath>

#include "qmalab/comparison.hpp"
#include "qmalab/random.hpp"

using namespace qmalab;

namespace {

/// Independent oracle: det(A + B) expanded by column multilinearity and
/// grouped by how many columns come from A. The size-k group is the mixed
/// discriminant term C(2n,k) D(A..A,B..B), nonnegative for PSD A, B; their sum
/// is the binomial expansion behind the wedge-power inequality.
double mixed_det_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                           double* min_group) {
    const int m = static_cast<int>(A.rows());
    std::vector<double> group(static_cast<size_t>(m) + 1, 0.0);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        Eigen::MatrixXcd M(m, m);
        int k = 0;
        for (int c = 0; c < m; ++c) {
            const bool from_a = (mask >> c) & 1u;
            M.col(c) = from_a ? A.col(c) : B.col(c);
            k += from_a;
        }
        group[static_cast<size_t>(k)] += M.determinant().real();
    }
    double total = 0.0;
    if (min_group) *min_group = 1e300;
    for (double g : group) {
        total += g;
        if (min_group) *min_group = std::min(*min_group, g);
    }
    return total;
}

}  // namespace

TEST_CASE("j_pullback: closed forms and involution") {
    const auto f1 = HypercomplexFrame::standard(1);
    const auto id = HermitianForm::identity(1);
    CHECK((j_pullback(id, f1).A + id.A).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXcd d(2, 2);
    d << 1, 0, 0, 0;
    const Eigen::MatrixXcd beta = -j_pullback({1, d}, f1).A;
    Eigen::MatrixXcd want(2, 2);
    want << 0, 0, 0, 1;
    CHECK((beta - want).cwiseAbs().maxCoeff() == 0.0);

    Rng rng(8);
    const auto f2 = HypercomplexFrame::standard(2);
    for (int t = 0; t < 200; ++t) {
        const HermitianForm a = random_hermitian_form(2, rng);
        const HermitianForm b = j_pullback(a, f2);
        CHECK(b.hermiticity_error() < 1e-12);
        // -j_pullback(-j_pullback(a)) = a
        const HermitianForm bb = j_pullback({2, -b.A}, f2);
        CHECK((-bb.A - a.A).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("beta = -j_pullback(alpha) is PSD for PSD alpha") {
    Rng rng(9);
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        for (int t = 0; t < 1000; ++t) {
            const HermitianForm a = random_psd_form(n, rng);
            const HermitianForm beta{n, -j_pullback(a, fr).A};
            CHECK(beta.min_eigenvalue() > -1e-11 * std::max(1.0, a.A.trace().real()));
        }
    }
}

TEST_CASE("hyperhermitian part: identity, diag, PSD preservation") {
    const auto f1 = HypercomplexFrame::standard(1);
    CHECK((hyperhermitian_part(HermitianForm::identity(1), f1).A -
           2.0 * Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    Eigen::MatrixXcd d(2, 2);
    d << 1, 0, 0, 0;
    CHECK((hyperhermitian_part({1, d}, f1).A - Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    Rng rng(10);
    const auto f2 = HypercomplexFrame::standard(2);
    for (int t = 0; t < 500; ++t) {
        const HermitianForm a = random_psd_form(2, rng);
        const HermitianForm hp = hyperhermitian_part(a, f2);
        CHECK(hp.min_eigenvalue() >=
              a.min_eigenvalue() - 1e-10 * std::max(1.0, std::abs(a.A.trace().real())));
        // hp is J-invariant
        const Eigen::MatrixXcd Jz = f2.j_complex().cast<std::complex<double>>();
        CHECK((Jz.transpose() * hp.A.conjugate() * Jz - hp.A).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("lemma 3.1: examples and the 1000-trial suites") {
    const auto f1 = HypercomplexFrame::standard(1);
    const auto rep = check_lemma31(HermitianForm::identity(1), f1);
    CHECK(rep.lhs_det == doctest::Approx(4.0));
    CHECK(rep.rhs_det == doctest::Approx(1.0));
    CHECK(rep.margin == doctest::Approx(3.0));

    const auto zero = check_lemma31({1, Eigen::MatrixXcd::Zero(2, 2)}, f1);
    CHECK(zero.margin == 0.0);

    Eigen::MatrixXcd neg(2, 2);
    neg << -1, 0, 0, 1;
    CHECK_THROWS_AS(check_lemma31({1, neg}, f1), std::invalid_argument);

    Rng rng(31);
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        for (int t = 0; t < 1000; ++t) {
            const auto r = check_lemma31(random_psd_form(n, rng), fr);
            CHECK(r.holds(1e-10));
        }
    }
}

TEST_CASE("lemma 3.1 against the mixed-determinant expansion oracle") {
    Rng rng(37);
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        for (int t = 0; t < 50; ++t) {
            const HermitianForm a = random_psd_form(n, rng);
            const Eigen::MatrixXcd beta = -j_pullback(a, fr).A;
            double min_group = 0.0;
            const double total = mixed_det_expansion(a.A, beta, &min_group);
            const double direct = (a.A + beta).determinant().real();
            CHECK(std::abs(total - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
            // every binomial term (mixed discriminant of PSD forms) is nonnegative,
            // so the sum dominates its k = 2n term det(alpha)
            CHECK(min_group >= -1e-9 * std::max(1.0, std::abs(direct)));
            CHECK(direct >= a.A.determinant().real() - 1e-9 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("prop 3.2: examples, suites and the Pfaffian cross-check") {
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        const auto rep = check_prop32(HermitianForm::identity(n), fr);
        CHECK(rep.quat_side / rep.complex_side == doctest::Approx(std::pow(2.0, 2 * n)));
    }
    const auto f1 = HypercomplexFrame::standard(1);
    const auto zero = check_prop32({1, Eigen::MatrixXcd::Zero(2, 2)}, f1);
    CHECK(zero.quat_side == 0.0);
    CHECK(zero.complex_side == 0.0);

    Eigen::MatrixXcd neg(2, 2);
    neg << -1, 0, 0, 0;
    CHECK_THROWS_AS(check_prop32({1, neg}, f1), std::invalid_argument);

    Rng rng(41);
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        for (int t = 0; t < 1000; ++t) {
            const auto r = check_prop32(random_psd_form(n, rng), fr);
            CHECK(r.holds(1e-10));
            CHECK(r.pfaffian_rel_err <= 1e-9);
        }
    }
}

TEST_CASE("quaternionic Hessian matrix agrees with the hyperhermitian part") {
    Rng rng(43);
    for (int n : {1, 2}) {
        const auto fr = HypercomplexFrame::standard(n);
        const Eigen::MatrixXcd eps = fr.epsilon().cast<std::complex<double>>();
        for (int t = 0; t < 100; ++t) {
            const HermitianForm a = random_hermitian_form(n, rng);
            const Eigen::MatrixXcd W = quaternionic_hessian_matrix(a.A, fr);
            const Eigen::MatrixXcd hp = hyperhermitian_part(a, fr).A;
            CHECK((W - eps * hp.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((W + W.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}
