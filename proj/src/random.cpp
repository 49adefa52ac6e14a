#include "qmalab/random.hpp"

namespace qmalab {

Eigen::MatrixXcd random_complex_matrix(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = std::complex<double>(g(rng), g(rng));
    return M;
}

HermitianForm random_psd_form(int n, Rng& rng) {
    const int m = 2 * n;
    std::uniform_real_distribution<double> logs(-1.5, 1.5);
    Eigen::MatrixXcd G = random_complex_matrix(m, m, rng);
    Eigen::VectorXd d(m);
    for (int i = 0; i < m; ++i) d(i) = std::pow(10.0, logs(rng));
    Eigen::MatrixXcd A = G.adjoint() * d.asDiagonal() * G;
    A = 0.5 * (A + A.adjoint()).eval();
    return {n, std::move(A)};
}

HermitianForm random_hermitian_form(int n, Rng& rng) {
    const int m = 2 * n;
    Eigen::MatrixXcd G = random_complex_matrix(m, m, rng);
    Eigen::MatrixXcd A = 0.5 * (G + G.adjoint());
    return {n, std::move(A)};
}

QuaternionMatrix random_quaternion_hermitian(int n, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    QuaternionMatrix H(n);
    for (int i = 0; i < n; ++i) {
        H.at(i, i) = Quaternion(g(rng), 0, 0, 0);
        for (int j = i + 1; j < n; ++j) {
            Quaternion q(g(rng), g(rng), g(rng), g(rng));
            H.at(i, j) = q;
            H.at(j, i) = q.conjugate();
        }
    }
    return H;
}

HyperhermitianForm random_j_real_form(int n, const HypercomplexFrame& frame, Rng& rng) {
    return decompose(random_quaternion_hermitian(n, rng), frame).second;
}

Eigen::MatrixXcd random_antisymmetric(int m, Rng& rng) {
    Eigen::MatrixXcd G = random_complex_matrix(m, m, rng);
    return 0.5 * (G - G.transpose());
}

}  // namespace qmalab
