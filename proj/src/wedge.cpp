#include "qmalab/wedge.hpp"

#include <bit>
#include <stdexcept>

namespace qmalab {

namespace {
constexpr double kDropTol = 0.0;  // keep exact zeros out, nothing else

// Sign of merging two disjoint index sets: (-1)^{#inversions}.
int merge_sign(uint32_t a, uint32_t b) {
    int sign = 1;
    while (b) {
        uint32_t low = b & (~b + 1u);  // lowest set bit of b
        // count bits of a above that position
        uint32_t above = a & ~(low | (low - 1u));
        if (std::popcount(above) & 1) sign = -sign;
        b &= b - 1u;
    }
    return sign;
}
}  // namespace

void ExteriorForm::add_term(uint32_t mask, std::complex<double> c) {
    auto it = terms_.find(mask);
    if (it == terms_.end()) {
        if (c != std::complex<double>(0.0, 0.0)) terms_.emplace(mask, c);
    } else {
        it->second += c;
        if (std::abs(it->second) <= kDropTol) terms_.erase(it);
    }
}

ExteriorForm ExteriorForm::scalar(std::complex<double> c) {
    ExteriorForm f;
    f.add_term(0u, c);
    return f;
}

ExteriorForm ExteriorForm::covector(int a) {
    if (a < 0 || a >= 30) throw std::invalid_argument("ExteriorForm: axis out of range");
    ExteriorForm f;
    f.add_term(1u << a, 1.0);
    return f;
}

ExteriorForm ExteriorForm::dz(int c) {
    ExteriorForm f;
    f.add_term(1u << (2 * c), 1.0);
    f.add_term(1u << (2 * c + 1), std::complex<double>(0.0, 1.0));
    return f;
}

ExteriorForm ExteriorForm::dz_bar(int c) {
    ExteriorForm f;
    f.add_term(1u << (2 * c), 1.0);
    f.add_term(1u << (2 * c + 1), std::complex<double>(0.0, -1.0));
    return f;
}

ExteriorForm ExteriorForm::from_two_form(const Eigen::MatrixXcd& W) {
    const int m = static_cast<int>(W.rows());
    ExteriorForm out;
    for (int c = 0; c < m; ++c)
        for (int d = c + 1; d < m; ++d)
            if (W(c, d) != std::complex<double>(0.0, 0.0))
                out = out + dz(c).wedge(dz(d)) * W(c, d);
    return out;
}

ExteriorForm ExteriorForm::from_one_one_form(const Eigen::MatrixXcd& A) {
    const int m = static_cast<int>(A.rows());
    const std::complex<double> half_i(0.0, 0.5);
    ExteriorForm out;
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d)
            if (A(c, d) != std::complex<double>(0.0, 0.0))
                out = out + dz(c).wedge(dz_bar(d)) * (half_i * A(c, d));
    return out;
}

ExteriorForm ExteriorForm::wedge(const ExteriorForm& o) const {
    ExteriorForm out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            if (ma & mb) continue;
            out.add_term(ma | mb, ca * cb * double(merge_sign(ma, mb)));
        }
    }
    return out;
}

ExteriorForm ExteriorForm::pow(int k) const {
    if (k < 0) throw std::invalid_argument("ExteriorForm::pow: negative power");
    ExteriorForm out = scalar(1.0);
    for (int i = 0; i < k; ++i) out = out.wedge(*this);
    return out;
}

ExteriorForm ExteriorForm::conjugate() const {
    ExteriorForm out;
    for (const auto& [m, c] : terms_) out.add_term(m, std::conj(c));
    return out;
}

ExteriorForm ExteriorForm::operator+(const ExteriorForm& o) const {
    ExteriorForm out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, c);
    return out;
}

ExteriorForm ExteriorForm::operator*(std::complex<double> s) const {
    ExteriorForm out;
    for (const auto& [m, c] : terms_) out.add_term(m, c * s);
    return out;
}

std::complex<double> ExteriorForm::coefficient(uint32_t mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

std::complex<double> ExteriorForm::top_coefficient(int d) const {
    return coefficient(d >= 32 ? ~0u : ((1u << d) - 1u));
}

}  // namespace qmalab
