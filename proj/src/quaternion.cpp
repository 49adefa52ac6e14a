#include "qmalab/quaternion.hpp"

#include <cmath>
#include <stdexcept>

namespace qmalab {

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::operator*(const Quaternion& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
}

QuaternionMatrix::QuaternionMatrix(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("QuaternionMatrix: n must be >= 1");
    a_.resize(static_cast<size_t>(n) * n);
}

QuaternionMatrix QuaternionMatrix::identity(int n) {
    QuaternionMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Quaternion(1, 0, 0, 0);
    return m;
}

QuaternionMatrix QuaternionMatrix::real_diagonal(const std::vector<double>& d) {
    QuaternionMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n(); ++i) m.at(i, i) = Quaternion(d[static_cast<size_t>(i)], 0, 0, 0);
    return m;
}

bool QuaternionMatrix::is_hermitian(double tol, int* bad_i, int* bad_j) const {
    for (int i = 0; i < n_; ++i) {
        for (int j = i; j < n_; ++j) {
            Quaternion diff = at(j, i) - at(i, j).conjugate();
            if (diff.norm() > tol) {
                if (bad_i) *bad_i = i;
                if (bad_j) *bad_j = j;
                return false;
            }
        }
    }
    return true;
}

double QuaternionMatrix::max_abs_diff(const QuaternionMatrix& o) const {
    double m = 0.0;
    for (size_t k = 0; k < a_.size(); ++k) {
        Quaternion d = a_[k] - o.a_[k];
        m = std::max({m, std::abs(d.w), std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
    return m;
}

}  // namespace qmalab
