#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <set>
#include <string>

#include "qmalab/comparison.hpp"
#include "qmalab/config.hpp"
#include "qmalab/gp.hpp"
#include "qmalab/io.hpp"
#include "qmalab/operators.hpp"
#include "qmalab/probe.hpp"
#include "qmalab/random.hpp"
#include "qmalab/selftest.hpp"
#include "qmalab/solver.hpp"

namespace {

using namespace qmalab;

void print_config(const Config& cfg, uint64_t seed) {
    std::cout << "# resolved config\n" << cfg.resolved_text() << "rng_seed = " << seed << "\n";
}

OperatorSpec operator_by_name(const std::string& name, int n) {
    if (name == "qma") return qma_operator(n);
    if (name == "laplace") return laplace_operator(n);
    if (name.rfind("sigma", 0) == 0) return sigma_operator(n, std::stoi(name.substr(5)));
    throw ConfigError("unknown operator: " + name);
}

ScalarField rhs_from_config(const Config& cfg, const TorusGrid& grid) {
    const std::string family = cfg.get_string("F.family", "constant");
    if (family == "file") {
        const GridFile gf = read_grid_file(cfg.get_string("F.file"));
        if (gf.n != static_cast<uint32_t>(grid.n()) || gf.N != static_cast<uint32_t>(grid.N()) ||
            gf.axes != static_cast<uint32_t>(grid.axes()))
            throw ConfigError("F.file grid header does not match n/N");
        return {grid, gf.data};
    }
    RhsFamily fam;
    fam.name = family;
    fam.sigma = cfg.get_double("F.sigma", 0.2);
    fam.amplitude = cfg.get_double("F.amplitude", 0.5);
    fam.center = cfg.get_double_list("F.center", {});
    return make_rhs(grid, fam);
}

SolveOptions solve_options(const Config& cfg) {
    SolveOptions opts;
    opts.tol = cfg.get_double("tol", opts.tol);
    opts.max_iters = cfg.get_int("max_iters", opts.max_iters);
    opts.force = cfg.get_bool("force", false);
    return opts;
}

int cmd_verify_inequalities(int n, int trials, uint64_t seed) {
    const auto frame = HypercomplexFrame::standard(n);
    Rng rng(seed);
    int lemma_pass = 0, prop_pass = 0;
    for (int t = 0; t < trials; ++t) {
        const HermitianForm alpha = random_psd_form(n, rng);
        if (check_lemma31(alpha, frame).holds(1e-10)) ++lemma_pass;
    }
    for (int t = 0; t < trials; ++t) {
        const HermitianForm hess = random_psd_form(n, rng);
        const auto rep = check_prop32(hess, frame);
        if (rep.holds(1e-10) && rep.pfaffian_rel_err <= 1e-9) ++prop_pass;
    }
    std::cout << lemma_pass << "/" << trials << " lemma31, " << prop_pass << "/" << trials
              << " prop32\n";

    bool structural_ok = true;
    std::vector<OperatorSpec> zoo = {qma_operator(n), laplace_operator(n)};
    for (int k = 2; k < n; ++k) zoo.push_back(sigma_operator(n, k));
    for (const auto& spec : zoo) {
        const auto rep = check_structural(spec, trials, seed + 17);
        std::cout << rep.passed << "/" << trials << " structural " << spec.name
                  << " (min gradient product " << format_double(rep.min_product) << ", gamma "
                  << format_double(spec.gamma) << ")\n";
        if (!rep.ok()) structural_ok = false;
    }
    // at n = 1 the max operator degenerates to the identity, so the negative
    // control runs in dimension >= 2
    const auto negative = check_structural(max_eigenvalue_operator(std::max(n, 2)), trials,
                                           seed + 23);
    if (negative.violation.has_value()) {
        std::cout << "negative control max_eigenvalue rejected: " << negative.violation->what
                  << "\n";
    } else {
        std::cout << "negative control max_eigenvalue unexpectedly passed\n";
        structural_ok = false;
    }
    return (lemma_pass == trials && prop_pass == trials && structural_ok) ? 0 : 1;
}

int cmd_solve(const std::string& config_path) {
    Config cfg = Config::parse_file(config_path);
    cfg.require_known_keys({"n", "N", "operator", "tol", "max_iters", "force", "out", "seed",
                            "F.family", "F.sigma", "F.amplitude", "F.center", "F.file"});
    const int n = cfg.get_int("n", 1);
    const int N = cfg.get_int("N", 16);
    const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
    print_config(cfg, seed);

    const auto frame = HypercomplexFrame::standard(n);
    TorusGrid grid(n, N);
    const ScalarField F = rhs_from_config(cfg, grid);
    const OperatorSpec spec = operator_by_name(cfg.get_string("operator", "qma"), n);
    const SolveResult res = solve(spec, F, frame, solve_options(cfg));
    const SolutionCheck chk = verify_solution(spec, F, res, frame);

    std::cout << "converged: iters = " << res.newton_iters
              << ", residual_inf = " << format_double(res.residual_inf)
              << ", b = " << format_double(res.b)
              << ", -inf phi = " << format_double(-res.phi.min())
              << ", min cone margin = " << format_double(res.min_eig_margin)
              << ", forward-backward = " << format_double(chk.forward_backward_err) << "\n";

    const std::string out = cfg.get_string("out", "solution.grid");
    GridFile gf;
    gf.n = static_cast<uint32_t>(n);
    gf.N = static_cast<uint32_t>(N);
    gf.axes = static_cast<uint32_t>(grid.axes());
    gf.data = res.phi.values;
    write_grid_file(out, gf);
    std::string meta;
    meta += "b = " + format_double(res.b) + "\n";
    meta += "residual_inf = " + format_double(res.residual_inf) + "\n";
    meta += "newton_iters = " + std::to_string(res.newton_iters) + "\n";
    meta += "min_eig_margin = " + format_double(res.min_eig_margin) + "\n";
    meta += "sup_phi = 0\n";
    atomic_write_file(out + ".meta.txt", meta);
    std::cout << "wrote " << out << " and " << out << ".meta.txt\n";
    return 0;
}

int cmd_probe(const std::string& config_path) {
    Config cfg = Config::parse_file(config_path);
    cfg.require_known_keys({"n", "N", "operator", "family", "sigmas", "normalize", "p", "q",
                            "target", "workers", "seed", "tol", "max_iters", "out_csv",
                            "out_svg", "F.sigma", "F.amplitude", "F.center"});
    ProbeConfig pc;
    pc.n = cfg.get_int("n", 1);
    pc.N = cfg.get_int("N", 16);
    pc.operator_name = cfg.get_string("operator", "qma");
    pc.family.name = cfg.get_string("family", "bump");
    pc.family.amplitude = cfg.get_double("F.amplitude", 1.0);
    pc.family.center = cfg.get_double_list("F.center", {});
    pc.sigmas = cfg.get_double_list("sigmas", {0.4, 0.2, 0.1});
    pc.mode = parse_normalize_mode(cfg.get_string("normalize", "fix_entropy"));
    pc.p = cfg.get_double("p", 3.0);
    pc.q = cfg.get_double("q", 3.0);
    pc.target = cfg.get_double("target", 1.0);
    pc.workers = cfg.get_int("workers", 2);
    pc.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
    pc.solve.tol = cfg.get_double("tol", pc.solve.tol);
    pc.solve.max_iters = cfg.get_int("max_iters", pc.solve.max_iters);
    print_config(cfg, pc.seed);

    const auto frame = HypercomplexFrame::standard(pc.n);
    const ProbeReport rep = run_probe(pc, frame);
    for (const auto& r : rep.rows)
        std::cout << "sigma = " << format_double(r.sigma)
                  << ": -inf phi = " << format_double(r.neg_inf_phi)
                  << ", entropy = " << format_double(r.entropy_norm)
                  << ", Lq = " << format_double(r.lq_norm)
                  << ", runtime_s = " << format_double(r.runtime_s) << "\n";
    std::cout << "empirical C = " << format_double(rep.empirical_C) << "\n";
    for (const auto& f : rep.flagged)
        std::cerr << "flagged sigma = " << format_double(f.sigma) << ": " << f.reason << "\n";

    atomic_write_file(cfg.get_string("out_csv", "probe.csv"), probe_csv(rep));
    atomic_write_file(cfg.get_string("out_svg", "probe.svg"), probe_svg(rep));
    return rep.flagged.empty() ? 0 : 3;
}

int cmd_gp_claim(const std::string& config_path) {
    Config cfg = Config::parse_file(config_path);
    cfg.require_known_keys({"n", "N", "r", "nodes", "s_fracs", "k_values", "mode", "directions",
                            "seed", "out_csv", "F.family", "F.sigma", "F.amplitude", "F.center",
                            "tol", "max_iters"});
    const int n = cfg.get_int("n", 1);
    const double r = cfg.get_double("r", 0.2);
    const int nodes = cfg.get_int("nodes", 513);
    const std::vector<double> s_fracs = cfg.get_double_list("s_fracs", {0.25, 0.5, 1.0});
    const std::vector<double> k_values = cfg.get_double_list("k_values", {10.0, 100.0});
    const std::string mode = cfg.get_string("mode", "const");
    const uint64_t seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
    print_config(cfg, seed);

    std::vector<std::pair<std::string, RadialInstance>> instances;
    const BallModel ball(n, r, nodes);
    if (mode == "const" || mode == "both")
        instances.emplace_back("const", constant_radial_instance(ball));
    if (mode == "solved" || mode == "both") {
        const auto frame = HypercomplexFrame::standard(n);
        TorusGrid grid(n, cfg.get_int("N", 12));
        const ScalarField F = rhs_from_config(cfg, grid);
        const SolveResult res = solve(operator_by_name("qma", n), F, frame, solve_options(cfg));
        instances.emplace_back(
            "solved",
            radial_instance_from_torus(res.phi, F, ball, cfg.get_int("directions", 64), seed));
    }
    if (instances.empty()) throw ConfigError("gp-claim: mode must be const, solved or both");

    std::string csv = csv_join({"instance", "s", "k", "A_sk", "C_empirical", "min_margin"});
    bool all_finite = true;
    for (const auto& [label, inst] : instances) {
        const auto rows = gp_claim_sweep(inst, s_fracs, k_values);
        for (const auto& row : rows) {
            csv += csv_join({label, format_double(row.s_param), format_double(row.k),
                             format_double(row.A_sk), format_double(row.C_empirical),
                             format_double(row.min_margin)});
            std::cout << label << ": s = " << format_double(row.s_param)
                      << ", k = " << format_double(row.k)
                      << ", A_sk = " << format_double(row.A_sk)
                      << ", C = " << format_double(row.C_empirical) << "\n";
            if (!std::isfinite(row.C_empirical)) all_finite = false;
        }
    }
    atomic_write_file(cfg.get_string("out_csv", "gp_claim.csv"), csv);
    return all_finite ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for quaternionic Monge-Ampere type equations on flat tori"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify-inequalities",
                                      "randomized comparison and structural-condition suites");
    int vi_n = 2, vi_trials = 1000;
    uint64_t vi_seed = 7;
    verify->add_option("--n", vi_n, "quaternionic dimension");
    verify->add_option("--trials", vi_trials, "number of random trials");
    verify->add_option("--seed", vi_seed, "rng seed");

    std::string solve_cfg, probe_cfg, gp_cfg;
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance from a config file");
    solve_cmd->add_option("--config", solve_cfg, "config file")->required();
    auto* probe_cmd = app.add_subcommand("probe", "uniform-estimate probe sweep from a config file");
    probe_cmd->add_option("--config", probe_cfg, "config file")->required();
    auto* gp_cmd = app.add_subcommand("gp-claim", "auxiliary-equation claim sweep");
    gp_cmd->add_option("--config", gp_cfg, "config file")->required();
    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in example checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) {
            std::cout << "# resolved config\nn = " << vi_n << "\ntrials = " << vi_trials
                      << "\nrng_seed = " << vi_seed << "\n";
            return cmd_verify_inequalities(vi_n, vi_trials, vi_seed);
        }
        if (solve_cmd->parsed()) return cmd_solve(solve_cfg);
        if (probe_cmd->parsed()) return cmd_probe(probe_cfg);
        if (gp_cmd->parsed()) return cmd_gp_claim(gp_cfg);
        if (selftest_cmd->parsed()) {
            const int failures = run_selftest(std::cout);
            return failures == 0 ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolveFailure& e) {
        std::cerr << "solver failure: " << e.what()
                  << " (last residual " << format_double(e.last_residual) << " after " << e.iters
                  << " iterations)\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
