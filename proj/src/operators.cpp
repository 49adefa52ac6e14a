#include "qmalab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qmalab/random.hpp"

namespace qmalab {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// e_0..e_k of lam (e_0 = 1).
std::vector<double> elementary_symmetric(const std::vector<double>& lam, int k) {
    std::vector<double> e(static_cast<size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (size_t i = 0; i < lam.size(); ++i) {
        const int top = std::min<int>(k, static_cast<int>(i) + 1);
        for (int j = top; j >= 1; --j)
            e[static_cast<size_t>(j)] += lam[i] * e[static_cast<size_t>(j) - 1];
    }
    return e;
}

std::vector<double> drop_index(const std::vector<double>& lam, size_t i) {
    std::vector<double> out;
    out.reserve(lam.size() - 1);
    for (size_t j = 0; j < lam.size(); ++j)
        if (j != i) out.push_back(lam[j]);
    return out;
}

void check_size(const OperatorSpec& spec, const std::vector<double>& lam) {
    if (static_cast<int>(lam.size()) != spec.n)
        throw std::invalid_argument(spec.name + ": eigenvalue tuple has wrong length");
}

}  // namespace

double OperatorSpec::evaluate(const std::vector<double>& lam) const {
    check_size(*this, lam);
    if (!in_cone(lam)) throw std::domain_error(name + ": point outside the admissible cone");
    return value(lam);
}

std::vector<double> OperatorSpec::grad_checked(const std::vector<double>& lam) const {
    check_size(*this, lam);
    if (!in_cone(lam)) throw std::domain_error(name + ": point outside the admissible cone");
    return gradient(lam);
}

OperatorSpec qma_operator(int n) {
    if (n < 1) throw std::invalid_argument("qma_operator: n must be >= 1");
    OperatorSpec s;
    s.name = "qma";
    s.n = n;
    s.value = [n](const std::vector<double>& lam) {
        double acc = 0.0;
        for (double x : lam) acc += std::log(x);
        return std::exp(acc / n);
    };
    s.gradient = [n, value = s.value](const std::vector<double>& lam) {
        const double f = value(lam);
        std::vector<double> g(lam.size());
        for (size_t i = 0; i < lam.size(); ++i) g[i] = f / (n * lam[i]);
        return g;
    };
    s.in_cone = [](const std::vector<double>& lam) {
        return std::all_of(lam.begin(), lam.end(), [](double x) { return x > 0.0; });
    };
    s.cone_margin = [](const std::vector<double>& lam) {
        return *std::min_element(lam.begin(), lam.end());
    };
    const std::vector<double> ones(static_cast<size_t>(n), 1.0);
    std::vector<double> g0 = s.gradient(ones);
    s.gamma = std::accumulate(g0.begin(), g0.end(), 1.0, std::multiplies<>());
    return s;
}

OperatorSpec laplace_operator(int n) {
    if (n < 1) throw std::invalid_argument("laplace_operator: n must be >= 1");
    OperatorSpec s;
    s.name = "laplace";
    s.n = n;
    s.value = [n](const std::vector<double>& lam) {
        return std::accumulate(lam.begin(), lam.end(), 0.0) / n;
    };
    s.gradient = [n](const std::vector<double>& lam) {
        return std::vector<double>(lam.size(), 1.0 / n);
    };
    s.in_cone = [](const std::vector<double>& lam) {
        return std::accumulate(lam.begin(), lam.end(), 0.0) > 0.0;
    };
    s.cone_margin = [n](const std::vector<double>& lam) {
        return std::accumulate(lam.begin(), lam.end(), 0.0) / std::sqrt(double(n));
    };
    const std::vector<double> ones(static_cast<size_t>(n), 1.0);
    std::vector<double> g0 = s.gradient(ones);
    s.gamma = std::accumulate(g0.begin(), g0.end(), 1.0, std::multiplies<>());
    return s;
}

OperatorSpec sigma_operator(int n, int k) {
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("sigma_operator: need 1 <= k <= n");
    OperatorSpec s;
    std::ostringstream name;
    name << "sigma" << k;
    s.name = name.str();
    s.n = n;
    const double ck = binom(n, k);
    s.value = [k, ck](const std::vector<double>& lam) {
        const auto e = elementary_symmetric(lam, k);
        return std::pow(e[static_cast<size_t>(k)] / ck, 1.0 / k);
    };
    s.gradient = [k, ck, value = s.value](const std::vector<double>& lam) {
        const double f = value(lam);
        const auto e = elementary_symmetric(lam, k);
        std::vector<double> g(lam.size());
        for (size_t i = 0; i < lam.size(); ++i) {
            const auto ei = elementary_symmetric(drop_index(lam, i), k - 1);
            g[i] = f * ei[static_cast<size_t>(k) - 1] / (k * e[static_cast<size_t>(k)]);
        }
        return g;
    };
    s.in_cone = [k](const std::vector<double>& lam) {
        const auto e = elementary_symmetric(lam, k);
        for (int j = 1; j <= k; ++j)
            if (e[static_cast<size_t>(j)] <= 0.0) return false;
        return true;
    };
    s.cone_margin = [n, k](const std::vector<double>& lam) {
        const auto e = elementary_symmetric(lam, k);
        double m = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= k; ++j) {
            const double v = e[static_cast<size_t>(j)] / binom(n, j);
            const double d = (v >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(v), 1.0 / j);
            m = std::min(m, d);
        }
        return m;
    };
    const std::vector<double> ones(static_cast<size_t>(n), 1.0);
    std::vector<double> g0 = s.gradient(ones);
    s.gamma = std::accumulate(g0.begin(), g0.end(), 1.0, std::multiplies<>());
    return s;
}

OperatorSpec max_eigenvalue_operator(int n) {
    OperatorSpec s;
    s.name = "max_eigenvalue";
    s.n = n;
    s.value = [](const std::vector<double>& lam) {
        return *std::max_element(lam.begin(), lam.end());
    };
    s.gradient = [](const std::vector<double>& lam) {
        std::vector<double> g(lam.size(), 0.0);
        g[static_cast<size_t>(
            std::max_element(lam.begin(), lam.end()) - lam.begin())] = 1.0;
        return g;
    };
    s.in_cone = [](const std::vector<double>& lam) {
        return std::all_of(lam.begin(), lam.end(), [](double x) { return x > 0.0; });
    };
    s.cone_margin = [](const std::vector<double>& lam) {
        return *std::min_element(lam.begin(), lam.end());
    };
    s.gamma = std::pow(double(n), -double(n));
    return s;
}

EigTuple paired_eigenvalues(const Eigen::MatrixXcd& h_phi, double pair_tol) {
    const int m = static_cast<int>(h_phi.rows());
    if (m % 2 != 0 || h_phi.cols() != m)
        throw std::invalid_argument("paired_eigenvalues: matrix must be 2n x 2n");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_phi, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();  // ascending
    const double radius = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    EigTuple out;
    out.lambda.resize(static_cast<size_t>(m) / 2);
    for (int i = 0; i < m / 2; ++i) {
        const double gap = ev(2 * i + 1) - ev(2 * i);
        out.pairing_gap_rel = std::max(out.pairing_gap_rel, gap / radius);
        out.lambda[static_cast<size_t>(m / 2 - 1 - i)] = 0.5 * (ev(2 * i) + ev(2 * i + 1));
    }
    if (out.pairing_gap_rel > pair_tol) {
        std::ostringstream os;
        os << "paired_eigenvalues: spectrum fails to pair (relative gap " << out.pairing_gap_rel
           << "); upstream form is not J-compatible";
        throw std::runtime_error(os.str());
    }
    return out;
}

EigTuple eigenvalues(const HyperhermitianForm& omega_phi, const HyperhermitianForm& omega,
                     const HypercomplexFrame& frame, double pair_tol) {
    if (omega_phi.n != frame.n() || omega.n != frame.n())
        throw std::invalid_argument("eigenvalues: dimension mismatch");
    const double scale = std::max(1.0, omega_phi.W.cwiseAbs().maxCoeff());
    if (omega_phi.antisymmetry_error() > 1e-10 * scale ||
        omega_phi.j_reality_error(frame) > 1e-10 * scale)
        throw std::invalid_argument("eigenvalues: omega_phi is not J-real antisymmetric");
    const HermitianForm h = associated_hermitian(omega, frame);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> base(h.A, Eigen::EigenvaluesOnly);
    if (base.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("eigenvalues: base form is not positive");
    const HermitianForm h_phi = associated_hermitian(omega_phi, frame);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(h_phi.A, h.A,
                                                                   Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = ges.eigenvalues();
    const int m = static_cast<int>(ev.size());
    const double radius = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    EigTuple out;
    out.lambda.resize(static_cast<size_t>(m) / 2);
    for (int i = 0; i < m / 2; ++i) {
        const double gap = ev(2 * i + 1) - ev(2 * i);
        out.pairing_gap_rel = std::max(out.pairing_gap_rel, gap / radius);
        out.lambda[static_cast<size_t>(m / 2 - 1 - i)] = 0.5 * (ev(2 * i) + ev(2 * i + 1));
    }
    if (out.pairing_gap_rel > pair_tol) {
        std::ostringstream os;
        os << "eigenvalues: pencil spectrum fails to pair (relative gap " << out.pairing_gap_rel
           << ")";
        throw std::runtime_error(os.str());
    }
    return out;
}

std::vector<double> linearization_coeffs(const OperatorSpec& spec, const std::vector<double>& lam) {
    const double f = spec.evaluate(lam);
    std::vector<double> g = spec.gradient(lam);
    for (double& x : g) x /= f;
    return g;
}

namespace {

std::vector<double> sample_orthant(int n, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> logr(-3.0, 3.0);
    std::vector<double> lam(static_cast<size_t>(n));
    double sum = 0.0;
    for (double& x : lam) {
        x = expo(rng);
        sum += x;
    }
    const double r = n * std::pow(10.0, logr(rng));
    for (double& x : lam) x *= r / sum;
    return lam;
}

std::vector<double> sample_cone(const OperatorSpec& spec, Rng& rng, bool widen) {
    if (!widen) return sample_orthant(spec.n, rng);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> logr(-3.0, 3.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> lam(static_cast<size_t>(spec.n));
        for (double& x : lam) x = g(rng);
        if (!spec.in_cone(lam)) continue;
        const double r = std::pow(10.0, logr(rng));
        for (double& x : lam) x *= r;
        return lam;
    }
    return sample_orthant(spec.n, rng);
}

}  // namespace

StructuralReport check_structural(const OperatorSpec& spec, int samples, uint64_t seed) {
    StructuralReport rep;
    rep.samples = samples;
    rep.min_partial = std::numeric_limits<double>::infinity();
    rep.min_product = std::numeric_limits<double>::infinity();
    Rng rng(seed);

    for (int t = 0; t < samples; ++t) {
        std::vector<double> lam = sample_cone(spec, rng, t % 2 == 1);
        const double f = spec.value(lam);
        std::vector<double> grad = spec.gradient(lam);

        double product = 1.0;
        for (size_t i = 0; i < grad.size(); ++i) {
            rep.min_partial = std::min(rep.min_partial, grad[i]);
            product *= grad[i];
            if (!(grad[i] > 0.0)) {
                rep.violation = {"partial derivative not positive (component " +
                                     std::to_string(i) + ")",
                                 lam};
                return rep;
            }
        }
        rep.min_product = std::min(rep.min_product, product);
        if (product < spec.gamma * (1.0 - 1e-8)) {
            rep.violation = {"gradient product below gamma", lam};
            return rep;
        }

        // central finite differences, base step 1e-5 |lam| with a
        // per-component relative fallback for strongly skewed tuples
        double norm = 0.0;
        for (double x : lam) norm = std::max(norm, std::abs(x));
        for (size_t i = 0; i < lam.size(); ++i) {
            const std::vector<double> steps = {1e-5 * norm, 1e-5 * std::abs(lam[i]),
                                               1e-6 * norm, 1e-7 * norm};
            double best = std::numeric_limits<double>::infinity();
            for (double h : steps) {
                if (!(h > 0.0)) continue;
                std::vector<double> lp = lam, lm = lam;
                lp[i] += h;
                lm[i] -= h;
                if (!spec.in_cone(lp) || !spec.in_cone(lm)) continue;
                const double fd = (spec.value(lp) - spec.value(lm)) / (2.0 * h);
                best = std::min(best,
                                std::abs(fd - grad[i]) / std::max(1e-30, std::abs(grad[i])));
                if (best < 1e-8) break;
            }
            if (std::isfinite(best)) {
                rep.max_grad_rel_err = std::max(rep.max_grad_rel_err, best);
                if (best > 1e-6) {
                    rep.violation = {"gradient disagrees with finite differences", lam};
                    return rep;
                }
            }
        }

        // Euler relation (degree-one homogeneity)
        double euler = 0.0;
        for (size_t i = 0; i < lam.size(); ++i) euler += lam[i] * grad[i];
        const double euler_rel = std::abs(euler - f) / std::max(1e-30, std::abs(f));
        rep.max_euler_rel_err = std::max(rep.max_euler_rel_err, euler_rel);
        if (euler_rel > 1e-9) {
            rep.violation = {"Euler relation violated", lam};
            return rep;
        }

        // permutation symmetry
        std::vector<double> perm = lam;
        std::shuffle(perm.begin(), perm.end(), rng);
        const double sym = std::abs(spec.value(perm) - f) / std::max(1e-30, std::abs(f));
        rep.max_symmetry_err = std::max(rep.max_symmetry_err, sym);
        if (sym > 1e-12) {
            rep.violation = {"operator is not symmetric", lam};
            return rep;
        }

        ++rep.passed;
    }
    return rep;
}

bool dominates_geometric_mean(const OperatorSpec& spec, int samples, uint64_t seed,
                              double* worst_gap) {
    Rng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < samples; ++t) {
        std::vector<double> lam = sample_orthant(spec.n, rng);
        double gm = 0.0;
        for (double x : lam) gm += std::log(x);
        gm = std::exp(gm / spec.n);
        const double gap = (spec.value(lam) - gm) / std::max(gm, 1e-300);
        worst = std::min(worst, gap);
    }
    if (worst_gap) *worst_gap = worst;
    return worst >= -1e-12;
}

}  // namespace qmalab
