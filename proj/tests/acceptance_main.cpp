// Acceptance suite: one criterion per section, one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qmalab/comparison.hpp"
#include "qmalab/gp.hpp"
#include "qmalab/operators.hpp"
#include "qmalab/probe.hpp"
#include "qmalab/random.hpp"
#include "qmalab/solver.hpp"

using namespace qmalab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
int g_failures = 0;
std::vector<double> g_pairing_gaps;  // collected over every solver run

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double now_between(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion1_lemma31() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    int failures = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int n : {1, 2}) {
        const auto frame = HypercomplexFrame::standard(n);
        for (int t = 0; t < 1000; ++t) {
            const auto rep = check_lemma31(random_psd_form(n, rng), frame);
            const double rel = rep.margin / std::max(1.0, rep.rhs_det);
            worst = std::min(worst, rel);
            if (rel < -1e-10) ++failures;
        }
    }
    const double dt = now_between(t0);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "2000 trials, %d failures, worst relative margin %.3e, %.2f s", failures, worst,
                  dt);
    report(1, "Lemma 3.1 determinant inequality suite", failures == 0 && dt < 10.0, detail);
}

void criterion2_prop32() {
    Rng rng(202);
    int failures = 0;
    double worst_route = 0.0;
    for (int n : {1, 2}) {
        const auto frame = HypercomplexFrame::standard(n);
        for (int t = 0; t < 1000; ++t) {
            const auto rep = check_prop32(random_psd_form(n, rng), frame);
            worst_route = std::max(worst_route, rep.pfaffian_rel_err);
            if (!rep.holds(1e-10) || rep.pfaffian_rel_err > 1e-9) ++failures;
        }
    }
    char detail[160];
    std::snprintf(detail, sizeof detail, "2000 trials, %d failures, worst route disagreement %.3e",
                  failures, worst_route);
    report(2, "Prop 3.2 quaternionic vs complex MA suite", failures == 0, detail);
}

void criterion3_structural() {
    bool ok = true;
    std::string detail;
    const std::vector<OperatorSpec> zoo = {qma_operator(1),    qma_operator(2),
                                           qma_operator(3),    laplace_operator(2),
                                           laplace_operator(3), sigma_operator(3, 2)};
    for (const auto& spec : zoo) {
        const auto rep = check_structural(spec, 1000, 303);
        const bool pass = rep.ok() && rep.max_euler_rel_err <= 1e-9 &&
                          rep.min_product >= spec.gamma * (1.0 - 1e-8);
        if (!pass) ok = false;
        detail += spec.name + "(n=" + std::to_string(spec.n) + ")" + (pass ? " ok" : " FAIL") + ", ";
    }
    const auto bad = check_structural(max_eigenvalue_operator(2), 1000, 304);
    const bool control = !bad.ok() && bad.violation.has_value() && !bad.violation->witness.empty();
    if (!control) ok = false;
    detail += control ? "negative control rejected with witness" : "negative control NOT rejected";
    report(3, "structural conditions for the operator zoo", ok, detail);
}

SolveResult run_cosine_solve(int N, const HypercomplexFrame& frame, const OperatorSpec& spec,
                             double* runtime) {
    TorusGrid grid(1, N);
    ScalarField F(grid);
    std::vector<int> idx(4);
    for (size_t p = 0; p < grid.points(); ++p) {
        grid.unflatten(p, idx.data());
        F.values[p] = 0.1 * std::cos(kTwoPi * grid.coord(idx[0]));
    }
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve(spec, F, frame);
    if (runtime) *runtime = now_between(t0);
    const SolutionCheck chk = verify_solution(spec, F, res, frame);
    g_pairing_gaps.push_back(std::max(res.max_pairing_gap, chk.max_pairing_gap));
    // stash the forward-backward error in an unused-for-solver field consumers ignore
    res.residual_inf = std::max(res.residual_inf, 0.0);
    return res;
}

void criterion4_solver() {
    const auto frame = HypercomplexFrame::standard(1);
    const auto spec = qma_operator(1);

    double runtime16 = 0.0;
    TorusGrid grid16(1, 16);
    ScalarField F16(grid16);
    std::vector<int> idx(4);
    for (size_t p = 0; p < grid16.points(); ++p) {
        grid16.unflatten(p, idx.data());
        F16.values[p] = 0.1 * std::cos(kTwoPi * grid16.coord(idx[0]));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult res16 = solve(spec, F16, frame);
    runtime16 = now_between(t0);
    const SolutionCheck chk16 = verify_solution(spec, F16, res16, frame);
    g_pairing_gaps.push_back(std::max(res16.max_pairing_gap, chk16.max_pairing_gap));

    double runtime32 = 0.0;
    const SolveResult res32 = run_cosine_solve(32, frame, spec, &runtime32);
    const double ninf16 = -res16.phi.min(), ninf32 = -res32.phi.min();
    const double refine_rel = std::abs(ninf16 - ninf32) / std::max(ninf16, ninf32);

    const bool ok = res16.newton_iters <= 30 && res16.residual_inf <= 1e-8 &&
                    chk16.forward_backward_err <= 1e-7 && res16.phi.max() == 0.0 &&
                    res16.min_eig_margin > 0.0 && runtime16 < 120.0 && refine_rel < 0.01;
    char detail[240];
    std::snprintf(detail, sizeof detail,
                  "iters %d, residual %.2e, fb %.2e, sup phi %.1e, margin %.3f, %.1f s; "
                  "-inf phi %.6f -> %.6f (%.3f%%), N=32 %.1f s",
                  res16.newton_iters, res16.residual_inf, chk16.forward_backward_err,
                  res16.phi.max(), res16.min_eig_margin, runtime16, ninf16, ninf32,
                  100.0 * refine_rel, runtime32);
    report(4, "solver self-consistency at n=1, N=16 with refinement to N=32", ok, detail);
}

void criterion6_gp_claim() {
    bool ok = true;
    std::string note;

    const BallModel ball(1, 0.2, 513);
    std::vector<std::pair<std::string, RadialInstance>> instances;
    instances.emplace_back("const", constant_radial_instance(ball));

    // solved-instance patch
    const auto frame = HypercomplexFrame::standard(1);
    TorusGrid grid(1, 12);
    RhsFamily fam;
    fam.name = "bump";
    fam.sigma = 0.25;
    fam.amplitude = 1.0;
    const ScalarField F = make_rhs(grid, fam);
    const SolveResult res = solve(qma_operator(1), F, frame);
    g_pairing_gaps.push_back(res.max_pairing_gap);
    instances.emplace_back("solved", radial_instance_from_torus(res.phi, F, ball, 64, 606));

    for (const auto& [label, inst] : instances) {
        const auto rows = gp_claim_sweep(inst, {0.25, 0.5, 1.0}, {10.0, 100.0});
        for (const auto& r : rows)
            if (!std::isfinite(r.C_empirical) || !(r.A_sk > 0.0)) {
                ok = false;
                note += label + " has a non-finite row; ";
            }
        // exact scaling C -> C / c when e^{2nF} -> c e^{2nF}
        RadialInstance scaled = inst;
        for (double& v : scaled.rhs_exp) v *= 2.0;
        const auto base = gp_claim_sweep(inst, {0.5}, {10.0});
        const auto resc = gp_claim_sweep(scaled, {0.5}, {10.0});
        const double scale_err =
            std::abs(resc[0].C_empirical * 2.0 - base[0].C_empirical) / base[0].C_empirical;
        if (scale_err > 1e-9) {
            ok = false;
            note += label + " scaling error " + std::to_string(scale_err) + "; ";
        }
        // A monotone in k with decreasing increments
        const double sp = 0.5 * ball.r * ball.r;
        const double limit = mass_A(inst, sp, std::numeric_limits<double>::infinity());
        double prev = std::numeric_limits<double>::infinity();
        double prev_diff = std::numeric_limits<double>::infinity();
        for (double k : {10.0, 100.0, 1000.0}) {
            const double a = mass_A(inst, sp, k);
            const double diff = a - limit;
            if (a >= prev || diff < -1e-12 || diff >= prev_diff) {
                ok = false;
                note += label + " A_{s,k} not monotone-convergent; ";
            }
            prev = a;
            prev_diff = diff;
        }
    }
    if (note.empty()) note = "const + solved patch, s/r^2 in {0.25,0.5,1}, k in {10,100}";
    report(6, "Guo-Phong claim constant: finite, 1/A scaling, A_{s,k} convergence", ok, note);
}

void criterion7_radial_oracle() {
    bool ok = true;
    double worst_cf = 0.0;
    for (int m : {2, 4}) {
        const double c = 1.9, S = 0.16;
        const auto sol = radial_cma_dirichlet([c](double) { return c; }, m, S, 513);
        const double up = std::pow(c, 1.0 / m);
        for (size_t j = 0; j < sol.s.size(); ++j) {
            worst_cf = std::max(worst_cf, std::abs(sol.uprime[j] - up));
            worst_cf = std::max(worst_cf, std::abs(sol.psi[j] - up * (sol.s[j] - S)));
        }
    }
    if (worst_cf > 1e-10) ok = false;

    auto g0 = [](double s) { return 0.5 + 30.0 * s * s + std::sin(7.0 * s) * std::sin(7.0 * s); };
    double worst_mass = 0.0;
    for (int m : {2, 4}) {
        const int nodes = 1025;
        const double S = 0.2;
        const double Z = ma_mass_of_density(g0, m, S, nodes - 1);
        auto g = [&](double s) { return g0(s) / Z; };
        const auto sol = radial_cma_dirichlet(g, m, S, nodes);
        worst_mass = std::max(worst_mass, std::abs(ma_mass(sol, m) - 1.0));
    }
    if (worst_mass > 1e-8) ok = false;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "closed-form error %.2e (tol 1e-10), unit-mass error %.2e (tol 1e-8)", worst_cf,
                  worst_mass);
    report(7, "radial complex MA Dirichlet oracle", ok, detail);
}

void criterion8_probe() {
    const auto frame = HypercomplexFrame::standard(1);
    ProbeConfig cfg;
    cfg.n = 1;
    cfg.N = 16;
    cfg.family.name = "bump";
    cfg.sigmas = {0.4, 0.2, 0.1};
    cfg.mode = NormalizeMode::fix_entropy;
    cfg.p = 3.0;
    cfg.target = 1.0;
    cfg.workers = 3;
    cfg.seed = 7;

    const ProbeReport rep1 = run_probe(cfg, frame);
    const ProbeReport rep2 = run_probe(cfg, frame);
    bool ok = rep1.flagged.empty() && rep1.rows.size() == 3;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : rep1.rows) {
        lo = std::min(lo, r.neg_inf_phi);
        hi = std::max(hi, r.neg_inf_phi);
        g_pairing_gaps.push_back(r.max_pairing_gap);
    }
    const double ratio = hi / std::max(lo, 1e-300);
    if (!(ratio < 3.0)) ok = false;
    const bool deterministic =
        probe_csv(rep1) == probe_csv(rep2) && probe_svg(rep1) == probe_svg(rep2);
    if (!deterministic) ok = false;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "%zu/3 converged, -inf phi in [%.5f, %.5f], max/min %.3f (< 3), %s",
                  rep1.rows.size(), lo, hi, ratio,
                  deterministic ? "artifacts byte-identical" : "artifacts DIFFER");
    report(8, "entropy-normalized concentration probe", ok, detail);
}

void criterion5_pairing() {
    double worst = 0.0;
    for (double g : g_pairing_gaps) worst = std::max(worst, g);
    char detail[120];
    std::snprintf(detail, sizeof detail, "%zu solver runs, worst relative pairing gap %.2e",
                  g_pairing_gaps.size(), worst);
    report(5, "eigenvalue pairing across all solver runs", worst < 1e-8 && !g_pairing_gaps.empty(),
           detail);
}

}  // namespace

int main() {
    criterion1_lemma31();
    criterion2_prop32();
    criterion3_structural();
    criterion4_solver();
    criterion6_gp_claim();
    criterion7_radial_oracle();
    criterion8_probe();
    criterion5_pairing();  // aggregates gaps from criteria 4, 6, 8
    std::printf("%s: %d criterion failure(s)\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
