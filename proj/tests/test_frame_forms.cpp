#include <doctest.h>

#include <cmath>

#include "qmalab/comparison.hpp"
#include "qmalab/forms.hpp"
#include "qmalab/random.hpp"
#include "qmalab/wedge.hpp"

using namespace qmalab;

namespace {
double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace

TEST_CASE("standard frame satisfies the defining identities") {
    for (int n : {1, 2, 3}) {
        const auto f = HypercomplexFrame::standard(n);
        CHECK(f.invariant_error() < 1e-12);
        const int d = 4 * n;
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
        CHECK(((f.I_mat() * f.J_mat() - f.K_mat()).cwiseAbs().maxCoeff()) == 0.0);
        CHECK(((f.I_mat() * f.J_mat() * f.K_mat() + id).cwiseAbs().maxCoeff()) == 0.0);
    }
    CHECK_THROWS_AS(HypercomplexFrame::standard(0), std::invalid_argument);
}

TEST_CASE("J acts antiholomorphically and squares to -Id on basis vectors") {
    const auto f = HypercomplexFrame::standard(1);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(4);
    e0(0) = 1.0;
    CHECK((f.J_mat() * (f.J_mat() * e0) + e0).norm() == 0.0);
    // z(Jx) = Jz conj(z(x)) on random vectors
    Rng rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = g(rng);
        const Eigen::VectorXcd z = f.complex_basis() * x.cast<std::complex<double>>();
        const Eigen::VectorXcd zj = f.complex_basis() * (f.J_mat() * x).cast<std::complex<double>>();
        const Eigen::VectorXcd want = f.j_complex().cast<std::complex<double>>() * z.conjugate();
        CHECK((zj - want).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("frames of higher dimension are direct sums") {
    const auto f1 = HypercomplexFrame::standard(1);
    const auto f2 = HypercomplexFrame::standard(2);
    CHECK((f2.I_mat().topLeftCorner(4, 4) - f1.I_mat()).norm() == 0.0);
    CHECK((f2.K_mat().bottomRightCorner(4, 4) - f1.K_mat()).norm() == 0.0);
    CHECK(f2.J_mat().topRightCorner(4, 4).norm() == 0.0);
}

TEST_CASE("decompose: identity and real diagonal closed forms") {
    const auto frame = HypercomplexFrame::standard(2);
    {
        auto [h, om] = decompose(QuaternionMatrix::identity(2), frame);
        CHECK((h.A - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((om.W - HyperhermitianForm::standard(2).W).cwiseAbs().maxCoeff() == 0.0);
        CHECK(pfaffian(om) == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        auto [h, om] = decompose(QuaternionMatrix::real_diagonal({1.5, -0.5}), frame);
        Eigen::VectorXcd diag(4);
        diag << 1.5, 1.5, -0.5, -0.5;
        CHECK((h.A - Eigen::MatrixXcd(diag.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
        CHECK(om.W(0, 1) == std::complex<double>(1.5, 0.0));
        CHECK(om.W(2, 3) == std::complex<double>(-0.5, 0.0));
        CHECK(om.W(1, 0) == std::complex<double>(-1.5, 0.0));
        CHECK(om.antisymmetry_error() == 0.0);
    }
}

TEST_CASE("decompose rejects non-hermitian input naming the first bad entry") {
    const auto frame = HypercomplexFrame::standard(3);
    QuaternionMatrix H = QuaternionMatrix::identity(3);
    H.at(1, 2) = Quaternion(0, 1, 0, 0);
    H.at(2, 1) = Quaternion(0, 1, 0, 0);  // should be the conjugate
    CHECK_THROWS_WITH_AS(decompose(H, frame),
                         doctest::Contains("(1, 2)"), std::invalid_argument);
}

TEST_CASE("decompose/recompose round trip on random quaternion-hermitian matrices") {
    Rng rng(1234);
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + t % 3;
        const auto frame = HypercomplexFrame::standard(n);
        const QuaternionMatrix H = random_quaternion_hermitian(n, rng);
        auto [h, om] = decompose(H, frame);
        CHECK(h.hermiticity_error() < 1e-13);
        CHECK(om.antisymmetry_error() < 1e-13);
        CHECK(om.j_reality_error(frame) < 1e-13);
        CHECK(H.max_abs_diff(recompose(h, om, frame)) < 1e-13);
        // associated hermitian inverts the correspondence
        CHECK((associated_hermitian(om, frame).A - h.A).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("hyperhermitian_from_hermitian requires J-invariance") {
    const auto frame = HypercomplexFrame::standard(1);
    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 0.0, 0.0, 0.0;  // diag(1,0) is not J-invariant
    CHECK_THROWS_AS(hyperhermitian_from_hermitian({1, bad}, frame), std::invalid_argument);
    const auto good = hyperhermitian_from_hermitian(HermitianForm::identity(1), frame);
    CHECK((good.W - HyperhermitianForm::standard(1).W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pfaffian: standard blocks and the determinant identity") {
    Eigen::MatrixXcd e2(2, 2);
    e2 << 0, 1, -1, 0;
    CHECK(pfaffian(e2).real() == doctest::Approx(1.0));
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(4, 4);
    b.block(0, 0, 2, 2) = 2.0 * e2;
    b.block(2, 2, 2, 2) = 3.0 * e2;
    CHECK(pfaffian(b).real() == doctest::Approx(6.0).epsilon(1e-12));

    CHECK_THROWS_AS(pfaffian(Eigen::MatrixXcd::Zero(3, 3)), std::invalid_argument);

    Rng rng(77);
    for (int t = 0; t < 500; ++t) {
        const int m = 2 * (1 + t % 4);  // sizes 2..8
        const Eigen::MatrixXcd W = random_antisymmetric(m, rng);
        const std::complex<double> pf = pfaffian(W);
        const std::complex<double> det = W.determinant();  // independent LU route
        CHECK(std::abs(pf * pf - det) <= 1e-10 * std::max(1.0, std::abs(det)));
    }
}

TEST_CASE("pfaffian of a J-real form is real") {
    Rng rng(13);
    const auto frame = HypercomplexFrame::standard(2);
    for (int t = 0; t < 50; ++t) {
        const HyperhermitianForm om = random_j_real_form(2, frame, rng);
        CHECK(std::isfinite(pfaffian(om)));
    }
}

TEST_CASE("volume constant from the wedge expansion") {
    const double c1 = volume_constant(1);
    CHECK(c1 == doctest::Approx(2.0).epsilon(1e-13));
    // product-structure relation fixes c(2) from c(1)
    const double c2 = volume_constant(2);
    CHECK(c2 == doctest::Approx(c1 * c1 * binom(2, 1) * binom(2, 1) / binom(4, 2)).epsilon(1e-12));

    // scaling: t Omega scales the top coefficient by t^{2n}
    const auto om = HyperhermitianForm::standard(1);
    const ExteriorForm base = ExteriorForm::from_two_form(om.W);
    const ExteriorForm scaled = ExteriorForm::from_two_form(om.W * 2.5);
    const auto lhs0 = base.wedge(base.conjugate()).top_coefficient(4);
    const auto lhs1 = scaled.wedge(scaled.conjugate()).top_coefficient(4);
    CHECK(std::abs(lhs1 - lhs0 * std::pow(2.5, 2)) < 1e-12);
}

TEST_CASE("one-one wedge powers compute determinants") {
    // independent check of the (1,1)-form normalization used everywhere:
    // Xi(M)^{2n} = det(M) omega_I^{2n}
    Rng rng(5);
    const HermitianForm M = random_psd_form(1, rng);
    const ExteriorForm xi = ExteriorForm::from_one_one_form(M.A);
    const ExteriorForm omI = ExteriorForm::from_one_one_form(Eigen::MatrixXcd::Identity(2, 2));
    const auto a = xi.pow(2).top_coefficient(4);
    const auto b = omI.pow(2).top_coefficient(4);
    CHECK(std::abs(a / b - M.A.determinant()) < 1e-12 * std::max(1.0, std::abs(M.A.determinant())));
}

TEST_CASE("positivity of Omega matches PSD-ness of the associated hermitian form") {
    Rng rng(2024);
    const auto frame = HypercomplexFrame::standard(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const HyperhermitianForm om = random_j_real_form(2, frame, rng);
        const bool psd = om.is_positive(frame, 1e-12);
        double worst = 1e300;
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd X(8);
            for (int i = 0; i < 8; ++i) X(i) = g(rng);
            const auto v = om.pairing(X, frame);
            CHECK(std::abs(v.imag()) < 1e-9 * std::max(1.0, std::abs(v.real())));
            worst = std::min(worst, v.real());
        }
        const double scale = std::max(1.0, om.W.cwiseAbs().maxCoeff());
        if (psd) CHECK(worst > -1e-9 * scale);
        if (associated_hermitian(om, frame).min_eigenvalue() < -0.05 * scale)
            CHECK(worst < 1e-9 * scale);
    }
}
