#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <unordered_map>

namespace qmalab {

/// Exterior form on R^d (d <= 30) with complex coefficients, stored sparsely as
/// bitmask-of-covectors -> coefficient. Big enough for the top-degree wedge
/// evaluations on R^{4n} at desk-scale n; not meant for large d.
class ExteriorForm {
  public:
    ExteriorForm() = default;

    static ExteriorForm scalar(std::complex<double> c);
    /// dx_a
    static ExteriorForm covector(int a);
    /// dz_c = dx_{2c} + i dx_{2c+1} in the standard layout.
    static ExteriorForm dz(int c);
    static ExteriorForm dz_bar(int c);
    /// (1/2) sum_{c,d} W_{cd} dz_c ^ dz_d for antisymmetric W.
    static ExteriorForm from_two_form(const Eigen::MatrixXcd& W);
    /// (i/2) sum_{c,d} A_{cd} dz_c ^ dz_bar_d for hermitian A; Id gives omega_I.
    static ExteriorForm from_one_one_form(const Eigen::MatrixXcd& A);

    ExteriorForm wedge(const ExteriorForm& o) const;
    ExteriorForm pow(int k) const;
    ExteriorForm conjugate() const;
    ExteriorForm operator+(const ExteriorForm& o) const;
    ExteriorForm operator*(std::complex<double> s) const;

    /// Coefficient of dx_0 ^ ... ^ dx_{d-1}.
    std::complex<double> top_coefficient(int d) const;
    std::complex<double> coefficient(uint32_t mask) const;
    size_t term_count() const { return terms_.size(); }

  private:
    std::unordered_map<uint32_t, std::complex<double>> terms_;
    void add_term(uint32_t mask, std::complex<double> c);
};

}  // namespace qmalab
