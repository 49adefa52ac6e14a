#include "qmalab/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qmalab/random.hpp"

namespace qmalab {

namespace {

constexpr double kPi = std::numbers::pi;

// 4-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlX[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                            0.8611363115940526};
constexpr double kGlW[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                            0.3478548451374538};

double gl_integrate(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += kGlW[q] * f(mid + half * kGlX[q]);
    return acc * half;
}

/// Composite Simpson over node samples (odd node count).
double simpson(const std::vector<double>& s, const std::vector<double>& f) {
    const size_t M = s.size();
    if (M < 3 || M % 2 == 0) throw std::invalid_argument("simpson: need an odd node count >= 3");
    const double h = s[1] - s[0];
    double acc = f[0] + f[M - 1];
    for (size_t j = 1; j + 1 < M; ++j) acc += f[j] * (j % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Piecewise-linear interpolation of a node profile.
double lerp_profile(const std::vector<double>& s, const std::vector<double>& f, double x) {
    if (x <= s.front()) return f.front();
    if (x >= s.back()) return f.back();
    const double h = s[1] - s[0];
    const size_t j = std::min(s.size() - 2, static_cast<size_t>((x - s.front()) / h));
    const double t = (x - s[j]) / (s[j + 1] - s[j]);
    return (1.0 - t) * f[j] + t * f[j + 1];
}

}  // namespace

double tau(double k, double x) {
    if (k < 1.0) throw std::invalid_argument("tau: k must be >= 1");
    return 0.5 * (x + std::sqrt(x * x + 1.0 / (k * k)));
}

double tau_limit(double x) { return x > 0.0 ? x : 0.0; }

BallModel::BallModel(int n_, double r_, int nodes_) : n(n_), r(r_), nodes(nodes_) {
    if (n < 1) throw std::invalid_argument("BallModel: n must be >= 1");
    if (!(r > 0.0 && r <= 0.5)) throw std::invalid_argument("BallModel: need 0 < r <= 1/2");
    if (nodes < 65 || nodes % 2 == 0)
        throw std::invalid_argument("BallModel: nodes must be odd and >= 65");
}

std::vector<double> BallModel::s_grid() const {
    std::vector<double> s(static_cast<size_t>(nodes));
    const double h = S() / (nodes - 1);
    for (int j = 0; j < nodes; ++j) s[static_cast<size_t>(j)] = j * h;
    return s;
}

RadialInstance::RadialInstance(const BallModel& b)
    : ball(b),
      s(b.s_grid()),
      phi(s.size(), 0.0),
      rhs_exp(s.size(), 1.0) {}

RadialInstance constant_radial_instance(const BallModel& ball) { return RadialInstance(ball); }

RadialInstance radial_instance_from_torus(const ScalarField& phi, const ScalarField& F,
                                          const BallModel& ball, int directions, uint64_t seed) {
    const TorusGrid& grid = *phi.grid;
    if (grid.n() != ball.n)
        throw std::invalid_argument("radial_instance_from_torus: dimension mismatch");
    if (2.0 * ball.r > 0.5)
        throw std::invalid_argument(
            "radial_instance_from_torus: ball of radius 2r does not fit in the torus (need r <= 1/4)");
    if (directions < 8) throw std::invalid_argument("radial_instance_from_torus: need >= 8 directions");

    // arg-min grid point as the center
    size_t pmin = 0;
    for (size_t p = 1; p < phi.values.size(); ++p)
        if (phi.values[p] < phi.values[pmin]) pmin = p;
    const int axes = grid.axes();
    std::vector<int> idx(static_cast<size_t>(axes));
    grid.unflatten(pmin, idx.data());
    Eigen::VectorXd z0(axes);
    for (int a = 0; a < axes; ++a) z0(a) = grid.coord(idx[static_cast<size_t>(a)]);

    // deterministic unit direction set (antipodal pairs)
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int half = directions / 2;
    Eigen::MatrixXd dirs(2 * half, axes);
    for (int d = 0; d < half; ++d) {
        Eigen::VectorXd v(axes);
        do {
            for (int a = 0; a < axes; ++a) v(a) = gauss(rng);
        } while (v.norm() < 1e-8);
        v.normalize();
        dirs.row(2 * d) = v.transpose();
        dirs.row(2 * d + 1) = -v.transpose();
    }

    RadialInstance inst(ball);
    const size_t M = inst.s.size();
    const int ndirs = static_cast<int>(dirs.rows());
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(M) * ndirs, axes);
    for (size_t j = 0; j < M; ++j) {
        const double rad = std::sqrt(inst.s[j]);
        for (int d = 0; d < ndirs; ++d) {
            for (int a = 0; a < axes; ++a) {
                double x = z0(a) + rad * dirs(d, a);
                x -= std::floor(x);  // periodic wrap into [0,1)
                pts(static_cast<Eigen::Index>(j) * ndirs + d, a) = x;
            }
        }
    }
    const std::vector<double> phi_samples = grid.interpolate(phi.values, pts);
    const std::vector<double> f_samples = grid.interpolate(F.values, pts);
    inst.phi_center = phi.values[pmin];
    const double scale_2n = 2.0 * ball.n;
    double boundary_min = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < M; ++j) {
        double pacc = 0.0, racc = 0.0;
        for (int d = 0; d < ndirs; ++d) {
            const double pv = phi_samples[j * static_cast<size_t>(ndirs) + static_cast<size_t>(d)];
            pacc += pv;
            racc += std::exp(scale_2n * f_samples[j * static_cast<size_t>(ndirs) + static_cast<size_t>(d)]);
            if (j == M - 1) boundary_min = std::min(boundary_min, pv - inst.phi_center);
        }
        inst.phi[j] = pacc / ndirs;
        inst.rhs_exp[j] = racc / ndirs;
    }
    inst.boundary_phi_margin = boundary_min;
    return inst;
}

std::vector<double> u_s_profile(const RadialInstance& inst, double s_param) {
    if (!(s_param > 0.0 && s_param < inst.ball.s_param_max())) {
        std::ostringstream os;
        os << "u_s_profile: s = " << s_param << " outside (0, " << inst.ball.s_param_max() << ")";
        throw std::invalid_argument(os.str());
    }
    std::vector<double> u(inst.s.size());
    for (size_t j = 0; j < u.size(); ++j)
        u[j] = inst.phi[j] - inst.phi_center + 0.5 * inst.s[j] - s_param;
    if (!(u.back() > 0.0))
        throw std::runtime_error(
            "u_s_profile: u_s is not positive on the boundary sphere (wrong center or radius)");
    return u;
}

double radial_weight(int m) { return m * std::pow(kPi, m); }

double mass_A(const RadialInstance& inst, double s_param, double k) {
    const int m = 2 * inst.ball.n;
    const std::vector<double> u = u_s_profile(inst, s_param);
    std::vector<double> f(u.size());
    const bool limit = std::isinf(k);
    for (size_t j = 0; j < u.size(); ++j) {
        const double t = limit ? tau_limit(-u[j]) : tau(k, -u[j]);
        f[j] = t * inst.rhs_exp[j] * std::pow(inst.s[j], m - 1);
    }
    return radial_weight(m) * simpson(inst.s, f);
}

RadialSolution radial_cma_dirichlet(const std::function<double(double)>& g, int m, double S,
                                    int nodes) {
    if (m < 1) throw std::invalid_argument("radial_cma_dirichlet: m must be >= 1");
    if (nodes < 65 || nodes % 2 == 0)
        throw std::invalid_argument("radial_cma_dirichlet: nodes must be odd and >= 65");
    const double g0 = g(0.0);
    if (!std::isfinite(g0))
        throw std::invalid_argument("radial_cma_dirichlet: rhs is singular at s = 0");

    RadialSolution sol;
    sol.s.resize(static_cast<size_t>(nodes));
    sol.uprime.resize(static_cast<size_t>(nodes));
    sol.psi.resize(static_cast<size_t>(nodes));
    const double h = S / (nodes - 1);
    for (int j = 0; j < nodes; ++j) sol.s[static_cast<size_t>(j)] = j * h;

    // cumulative C(s) = int_0^s m t^{m-1} g(t) dt by per-interval Gauss-Legendre
    auto integrand = [&](double t) {
        const double gv = g(t);
        if (gv < 0.0) throw std::invalid_argument("radial_cma_dirichlet: rhs must be nonnegative");
        return m * std::pow(t, m - 1) * gv;
    };
    double cum = 0.0;
    sol.uprime[0] = std::pow(g0, 1.0 / m);
    for (int j = 1; j < nodes; ++j) {
        cum += gl_integrate(integrand, sol.s[static_cast<size_t>(j) - 1],
                            sol.s[static_cast<size_t>(j)]);
        const double sj = sol.s[static_cast<size_t>(j)];
        sol.uprime[static_cast<size_t>(j)] = std::pow(std::max(0.0, cum) / std::pow(sj, m), 1.0 / m);
    }

    // psi(s) = -int_s^S u'(t) dt, cumulative trapezoid from the boundary
    sol.psi[static_cast<size_t>(nodes) - 1] = 0.0;
    for (int j = nodes - 2; j >= 0; --j)
        sol.psi[static_cast<size_t>(j)] =
            sol.psi[static_cast<size_t>(j) + 1] -
            0.5 * h * (sol.uprime[static_cast<size_t>(j)] + sol.uprime[static_cast<size_t>(j) + 1]);
    return sol;
}

double ma_mass(const RadialSolution& sol, int m) {
    return std::pow(2.0 * kPi * sol.s.back() * sol.uprime.back(), m);
}

double ma_mass_of_density(const std::function<double(double)>& g, int m, double S, int intervals) {
    auto f = [&](double t) { return g(t) * std::pow(t, m - 1); };
    double acc = 0.0;
    const double h = S / intervals;
    for (int j = 0; j < intervals; ++j) acc += gl_integrate(f, j * h, (j + 1) * h);
    return std::pow(2.0, m) * radial_weight(m) * acc;
}

ClaimReport verify_claim(const std::vector<double>& s, const std::vector<double>& u,
                         const std::vector<double>& psi, double A_sk, int n) {
    if (s.size() != u.size() || s.size() != psi.size())
        throw std::invalid_argument("verify_claim: profiles must share the evaluation grid");
    if (!(A_sk > 0.0)) throw std::invalid_argument("verify_claim: A_sk must be positive");
    ClaimReport rep;
    const double p = 2.0 * n;
    for (size_t j = 0; j < s.size(); ++j) {
        if (u[j] >= 0.0) continue;
        ++rep.active_nodes;
        if (psi[j] >= 0.0)
            throw std::runtime_error("verify_claim: psi >= 0 inside the sublevel set (oracle bug)");
        const double val = std::pow(-u[j], p + 1.0) / (std::pow(-psi[j], p) * A_sk);
        rep.C_empirical = std::max(rep.C_empirical, val);
    }
    if (rep.active_nodes > 0 && !std::isfinite(rep.C_empirical))
        throw std::runtime_error("verify_claim: claim constant is not finite");
    return rep;
}

std::vector<GpSweepRow> gp_claim_sweep(const RadialInstance& inst,
                                       const std::vector<double>& s_fracs,
                                       const std::vector<double>& k_values) {
    const int n = inst.ball.n;
    const int m = 2 * n;
    std::vector<GpSweepRow> rows;
    for (double frac : s_fracs) {
        const double s_param = frac * inst.ball.r * inst.ball.r;
        const std::vector<double> u = u_s_profile(inst, s_param);
        for (double k : k_values) {
            const double A = mass_A(inst, s_param, k);
            std::vector<double> rho(u.size());
            for (size_t j = 0; j < u.size(); ++j) rho[j] = tau(k, -u[j]) * inst.rhs_exp[j];
            auto g = [&](double t) {
                return lerp_profile(inst.s, rho, t) / (std::pow(2.0, m) * A);
            };
            const RadialSolution sol = radial_cma_dirichlet(g, m, inst.ball.S(), inst.ball.nodes);
            const ClaimReport claim = verify_claim(inst.s, u, sol.psi, A, n);
            rows.push_back({s_param, k, A, claim.C_empirical, u.back()});
        }
    }
    return rows;
}

}  // namespace qmalab
