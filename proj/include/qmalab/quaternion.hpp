#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qmalab {

/// Quaternion q = w + x*i + y*j + z*k stored as four reals.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Quaternion() = default;
    Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    /// Split q = alpha + beta * j with alpha, beta in the complex subfield span(1, i).
    std::complex<double> alpha() const { return {w, x}; }
    std::complex<double> beta() const { return {y, z}; }
    static Quaternion from_parts(std::complex<double> alpha, std::complex<double> beta) {
        return {alpha.real(), alpha.imag(), beta.real(), beta.imag()};
    }

    Quaternion conjugate() const { return {w, -x, -y, -z}; }
    double norm() const;

    Quaternion operator+(const Quaternion& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
    Quaternion operator-(const Quaternion& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
    Quaternion operator*(const Quaternion& o) const;
    Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
};

/// Dense n x n quaternion matrix, row-major.
class QuaternionMatrix {
  public:
    explicit QuaternionMatrix(int n);
    static QuaternionMatrix identity(int n);
    static QuaternionMatrix real_diagonal(const std::vector<double>& d);

    int n() const { return n_; }
    Quaternion& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const Quaternion& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    /// Quaternion-hermitian: at(j,i) == at(i,j).conjugate(). On failure reports the
    /// first violating index pair.
    bool is_hermitian(double tol, int* bad_i = nullptr, int* bad_j = nullptr) const;

    double max_abs_diff(const QuaternionMatrix& o) const;

  private:
    int n_;
    std::vector<Quaternion> a_;
};

}  // namespace qmalab
