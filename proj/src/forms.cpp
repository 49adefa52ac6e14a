#include "qmalab/forms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "qmalab/wedge.hpp"

namespace qmalab {

namespace {
void check_dims(int n, const Eigen::MatrixXcd& M, const char* who) {
    if (M.rows() != 2 * n || M.cols() != 2 * n) {
        std::ostringstream os;
        os << who << ": expected " << 2 * n << "x" << 2 * n << " matrix, got " << M.rows() << "x"
           << M.cols();
        throw std::invalid_argument(os.str());
    }
}
}  // namespace

HermitianForm::HermitianForm(int n_, Eigen::MatrixXcd A_) : n(n_), A(std::move(A_)) {
    check_dims(n, A, "HermitianForm");
}

HermitianForm HermitianForm::identity(int n) {
    return {n, Eigen::MatrixXcd::Identity(2 * n, 2 * n)};
}

double HermitianForm::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool HermitianForm::is_psd(double tol_scale) const {
    double scale = std::max(1.0, std::abs(A.trace().real()));
    return min_eigenvalue() >= -tol_scale * scale;
}

double HermitianForm::hermiticity_error() const {
    return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

HyperhermitianForm::HyperhermitianForm(int n_, Eigen::MatrixXcd W_) : n(n_), W(std::move(W_)) {
    check_dims(n, W, "HyperhermitianForm");
}

HyperhermitianForm HyperhermitianForm::standard(int n) {
    HyperhermitianForm out(n, Eigen::MatrixXcd::Zero(2 * n, 2 * n));
    for (int a = 0; a < n; ++a) {
        out.W(2 * a, 2 * a + 1) = 1.0;
        out.W(2 * a + 1, 2 * a) = -1.0;
    }
    return out;
}

double HyperhermitianForm::antisymmetry_error() const {
    return (W + W.transpose()).cwiseAbs().maxCoeff();
}

double HyperhermitianForm::j_reality_error(const HypercomplexFrame& frame) const {
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    return (Jz.transpose() * W * Jz - W.conjugate()).cwiseAbs().maxCoeff();
}

std::complex<double> HyperhermitianForm::pairing(const Eigen::VectorXd& X,
                                                 const HypercomplexFrame& frame) const {
    const Eigen::VectorXcd z = frame.complex_basis() * X.cast<std::complex<double>>();
    const Eigen::VectorXcd zj = frame.j_complex().cast<std::complex<double>>() * z.conjugate();
    return z.transpose() * W * zj;
}

bool HyperhermitianForm::is_positive(const HypercomplexFrame& frame, double tol_scale) const {
    return associated_hermitian(*this, frame).is_psd(tol_scale);
}

HermitianForm associated_hermitian(const HyperhermitianForm& omega, const HypercomplexFrame& frame) {
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    Eigen::MatrixXcd h = -Jz.transpose() * omega.W.conjugate();
    return {omega.n, std::move(h)};
}

HyperhermitianForm hyperhermitian_from_hermitian(const HermitianForm& h,
                                                 const HypercomplexFrame& frame) {
    const Eigen::MatrixXcd Jz = frame.j_complex().cast<std::complex<double>>();
    const Eigen::MatrixXcd jinv = Jz.transpose() * h.A.conjugate() * Jz;
    double scale = std::max(1.0, h.A.cwiseAbs().maxCoeff());
    if ((jinv - h.A).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument(
            "hyperhermitian_from_hermitian: form is not J-invariant (no quaternionic origin)");
    const Eigen::MatrixXcd eps = frame.epsilon().cast<std::complex<double>>();
    return {h.n, eps * h.A.conjugate()};
}

std::pair<HermitianForm, HyperhermitianForm> decompose(const QuaternionMatrix& H,
                                                       const HypercomplexFrame& frame) {
    if (H.n() != frame.n()) throw std::invalid_argument("decompose: dimension mismatch");
    int bi = 0, bj = 0;
    if (!H.is_hermitian(1e-12, &bi, &bj)) {
        std::ostringstream os;
        os << "decompose: input is not quaternion-hermitian at entry (" << bi << ", " << bj << ")";
        throw std::invalid_argument(os.str());
    }
    const int n = H.n();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const std::complex<double> al = H.at(a, b).alpha();
            const std::complex<double> be = H.at(a, b).beta();
            h(2 * a, 2 * b) = al;
            h(2 * a, 2 * b + 1) = be;
            h(2 * a + 1, 2 * b) = -std::conj(be);
            h(2 * a + 1, 2 * b + 1) = std::conj(al);
            W(2 * a, 2 * b) = -be;
            W(2 * a, 2 * b + 1) = al;
            W(2 * a + 1, 2 * b) = -std::conj(al);
            W(2 * a + 1, 2 * b + 1) = -std::conj(be);
        }
    }
    return {HermitianForm(n, std::move(h)), HyperhermitianForm(n, std::move(W))};
}

QuaternionMatrix recompose(const HermitianForm& h, const HyperhermitianForm& omega,
                           const HypercomplexFrame& frame) {
    if (h.n != frame.n() || omega.n != frame.n())
        throw std::invalid_argument("recompose: dimension mismatch");
    const Eigen::MatrixXcd eps = frame.epsilon().cast<std::complex<double>>();
    double scale = std::max(1.0, h.A.cwiseAbs().maxCoeff());
    if ((omega.W - eps * h.A.conjugate()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("recompose: hermitian and hyperhermitian parts disagree");
    const int n = h.n;
    QuaternionMatrix H(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            H.at(a, b) = Quaternion::from_parts(h.A(2 * a, 2 * b), h.A(2 * a, 2 * b + 1));
    return H;
}

std::complex<double> pfaffian(const Eigen::MatrixXcd& W) {
    const Eigen::Index m = W.rows();
    if (W.cols() != m) throw std::invalid_argument("pfaffian: matrix must be square");
    if (m % 2 != 0) throw std::invalid_argument("pfaffian: dimension must be even");
    if (m == 0) return 1.0;

    Eigen::MatrixXcd M = W;
    std::complex<double> result = 1.0;
    for (Eigen::Index k = 0; k + 1 < m; k += 2) {
        // pivot: largest |M(i, k)| for i > k
        Eigen::Index kp = k + 1;
        for (Eigen::Index i = k + 2; i < m; ++i)
            if (std::abs(M(i, k)) > std::abs(M(kp, k))) kp = i;
        if (kp != k + 1) {
            M.row(k + 1).swap(M.row(kp));
            M.col(k + 1).swap(M.col(kp));
            result = -result;
        }
        const std::complex<double> pivot = M(k + 1, k);
        if (pivot == std::complex<double>(0.0, 0.0)) return 0.0;
        result *= M(k, k + 1);
        if (k + 2 < m) {
            // eliminate row/column k and k+1 from the trailing block
            const Eigen::Index r = m - (k + 2);
            Eigen::VectorXcd tau = M.block(k + 2, k, r, 1) / pivot;
            Eigen::VectorXcd col1 = M.block(k + 2, k + 1, r, 1);
            M.block(k + 2, k + 2, r, r).noalias() += tau * col1.transpose();
            M.block(k + 2, k + 2, r, r).noalias() -= col1 * tau.transpose();
        }
    }
    return result;
}

double pfaffian(const HyperhermitianForm& omega) {
    const std::complex<double> p = pfaffian(omega.W);
    if (std::abs(p.imag()) > 1e-8 * std::max(1.0, std::abs(p.real())))
        throw std::runtime_error("pfaffian: J-real form produced a non-real Pfaffian");
    return p.real();
}

double volume_constant(int n) {
    if (n < 1) throw std::invalid_argument("volume_constant: n must be >= 1");
    static std::mutex mu;
    static std::map<int, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    const HyperhermitianForm omega_std = HyperhermitianForm::standard(n);
    const ExteriorForm om = ExteriorForm::from_two_form(omega_std.W).pow(n);
    const ExteriorForm lhs = om.wedge(om.conjugate());
    const ExteriorForm rhs =
        ExteriorForm::from_one_one_form(Eigen::MatrixXcd::Identity(2 * n, 2 * n)).pow(2 * n);
    const std::complex<double> a = lhs.top_coefficient(4 * n);
    const std::complex<double> b = rhs.top_coefficient(4 * n);
    if (std::abs(b) == 0.0) throw std::runtime_error("volume_constant: degenerate omega_I power");
    const std::complex<double> c = a / b;
    if (std::abs(c.imag()) > 1e-12 * std::abs(c.real()))
        throw std::runtime_error("volume_constant: non-real ratio");
    {
        std::lock_guard<std::mutex> lock(mu);
        cache[n] = c.real();
    }
    return c.real();
}

}  // namespace qmalab
