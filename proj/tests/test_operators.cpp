#include <doctest.h>

#include <cmath>

#include "qmalab/operators.hpp"
#include "qmalab/random.hpp"

using namespace qmalab;

TEST_CASE("qma operator: normalization, values, Euler relation") {
    const auto q2 = qma_operator(2);
    CHECK(q2.evaluate({1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q2.evaluate({4.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(q2.gamma == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(q2.evaluate({-1.0, 1.0}), std::domain_error);

    Rng rng(3);
    std::uniform_real_distribution<double> u(0.05, 20.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> lam = {u(rng), u(rng)};
        const double f = q2.evaluate(lam);
        const auto g = q2.grad_checked(lam);
        CHECK(std::abs(lam[0] * g[0] + lam[1] * g[1] - f) <= 1e-10 * f);
    }
}

TEST_CASE("sigma operators: normalization, cones, domination") {
    const auto s2 = sigma_operator(3, 2);
    CHECK(s2.evaluate({1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s2.in_cone({1.0, 1.0, -0.4}));
    CHECK_FALSE(s2.in_cone({1.0, -1.0, -1.0}));
    CHECK(sigma_operator(3, 1).evaluate({3.0, 2.0, 1.0}) == doctest::Approx(2.0));
    // k = n reduces to the geometric mean
    const auto s3 = sigma_operator(3, 3);
    const auto q3 = qma_operator(3);
    CHECK(s3.evaluate({2.0, 3.0, 4.0}) == doctest::Approx(q3.evaluate({2.0, 3.0, 4.0})));

    double gap = 0.0;
    CHECK(dominates_geometric_mean(s2, 2000, 7, &gap));
    CHECK(dominates_geometric_mean(laplace_operator(3), 2000, 8, &gap));
    // a quotient with l >= 1 (harmonic mean at n=2) does not dominate
    OperatorSpec hm;
    hm.name = "harmonic";
    hm.n = 2;
    hm.value = [](const std::vector<double>& lam) {
        return 2.0 * lam[0] * lam[1] / (lam[0] + lam[1]);
    };
    hm.gradient = [](const std::vector<double>& lam) {
        const double s = lam[0] + lam[1];
        return std::vector<double>{2.0 * lam[1] * lam[1] / (s * s),
                                   2.0 * lam[0] * lam[0] / (s * s)};
    };
    hm.in_cone = [](const std::vector<double>& lam) { return lam[0] > 0 && lam[1] > 0; };
    hm.cone_margin = [](const std::vector<double>& lam) { return std::min(lam[0], lam[1]); };
    hm.gamma = 0.0;
    CHECK_FALSE(dominates_geometric_mean(hm, 2000, 9, &gap));
    CHECK(gap < -1e-3);
}

TEST_CASE("structural checker: shipped zoo passes, negative control fails") {
    for (int n : {2, 3}) {
        const auto q = check_structural(qma_operator(n), 1000, 11);
        CHECK(q.ok());
        CHECK(q.min_product >= std::pow(double(n), -double(n)) * (1.0 - 1e-8));
        CHECK(q.max_grad_rel_err < 1e-6);
        CHECK(q.max_euler_rel_err < 1e-9);

        const auto l = check_structural(laplace_operator(n), 1000, 12);
        CHECK(l.ok());
        CHECK(l.min_product == doctest::Approx(std::pow(double(n), -double(n))).epsilon(1e-12));
    }
    const auto s = check_structural(sigma_operator(3, 2), 1000, 13);
    CHECK(s.ok());
    CHECK(s.min_product >= std::pow(3.0, -3.0) * (1.0 - 1e-8));

    const auto bad = check_structural(max_eigenvalue_operator(2), 1000, 14);
    CHECK_FALSE(bad.ok());
    REQUIRE(bad.violation.has_value());
    CHECK(bad.violation->what.find("positive") != std::string::npos);
    CHECK(bad.violation->witness.size() == 2);
}

TEST_CASE("linearization coefficients") {
    const auto q3 = qma_operator(3);
    auto w = linearization_coeffs(q3, {1.0, 1.0, 1.0});
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const auto q2 = qma_operator(2);
    w = linearization_coeffs(q2, {4.0, 1.0});
    CHECK(w[0] == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK_THROWS_AS(linearization_coeffs(q2, {-1.0, 1.0}), std::domain_error);

    // product lower bound gamma / f^n
    Rng rng(15);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> lam = {u(rng), u(rng)};
        const auto coeffs = linearization_coeffs(q2, lam);
        const double f = q2.evaluate(lam);
        double prod = 1.0;
        for (double x : coeffs) prod *= x;
        CHECK(prod >= q2.gamma / std::pow(f, 2) * (1.0 - 1e-10));
    }
}

TEST_CASE("pencil eigenvalues: trivial, diagonal and random cases") {
    const auto frame = HypercomplexFrame::standard(2);
    const auto om = HyperhermitianForm::standard(2);
    auto e = eigenvalues(om, om, frame);
    CHECK(e.lambda[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e.lambda[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e.pairing_gap_rel < 1e-12);

    HyperhermitianForm scaled = om;
    scaled.W.block(0, 0, 2, 2) *= 2.5;
    scaled.W.block(2, 2, 2, 2) *= 0.5;
    e = eigenvalues(scaled, om, frame);
    CHECK(e.lambda[0] == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(e.lambda[1] == doctest::Approx(0.5).epsilon(1e-13));

    // non-positive base rejected
    HyperhermitianForm neg = om;
    neg.W *= -1.0;
    CHECK_THROWS_AS(eigenvalues(om, neg, frame), std::invalid_argument);

    Rng rng(16);
    for (int t = 0; t < 200; ++t) {
        const HyperhermitianForm pert = random_j_real_form(2, frame, rng);
        const EigTuple et = eigenvalues(pert, om, frame);
        CHECK(et.pairing_gap_rel < 1e-8);
        CHECK(et.lambda.size() == 2);
        CHECK(et.lambda[0] >= et.lambda[1]);

        // independent oracle: eigenvalues of h^{-1} h_phi via the
        // non-selfadjoint solver
        const Eigen::MatrixXcd h = associated_hermitian(om, frame).A;
        const Eigen::MatrixXcd hp = associated_hermitian(pert, frame).A;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(h.inverse() * hp);
        std::vector<double> all;
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(ces.eigenvalues()(i).imag()) < 1e-8);
            all.push_back(ces.eigenvalues()(i).real());
        }
        std::sort(all.begin(), all.end());
        CHECK(0.5 * (all[0] + all[1]) ==
              doctest::Approx(et.lambda[1]).epsilon(1e-8));
        CHECK(0.5 * (all[2] + all[3]) ==
              doctest::Approx(et.lambda[0]).epsilon(1e-8));
    }
}

TEST_CASE("Pfaffian ratio equals the eigenvalue product for positive pencils") {
    Rng rng(17);
    const auto frame = HypercomplexFrame::standard(2);
    const auto om = HyperhermitianForm::standard(2);
    int done = 0;
    while (done < 100) {
        HyperhermitianForm pert = random_j_real_form(2, frame, rng);
        if (!pert.is_positive(frame, 0.0)) continue;
        ++done;
        const EigTuple et = eigenvalues(pert, om, frame);
        const double ratio = pfaffian(pert) / pfaffian(om);
        double prod = 1.0;
        for (double l : et.lambda) prod *= l;
        CHECK(ratio == doctest::Approx(prod).epsilon(1e-9));
    }
}

TEST_CASE("pairing failure is detected for non-J-compatible input") {
    const auto frame = HypercomplexFrame::standard(1);
    Eigen::MatrixXcd notjreal(2, 2);
    notjreal << 0.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 0.0;
    CHECK_THROWS_AS(eigenvalues({1, notjreal}, HyperhermitianForm::standard(1), frame),
                    std::invalid_argument);
    // a hermitian matrix with unpaired spectrum trips paired_eigenvalues
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(paired_eigenvalues(h), std::runtime_error);
}
