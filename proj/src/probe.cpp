#include "qmalab/probe.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qmalab/io.hpp"

namespace qmalab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Smooth periodic squared distance surrogate: sum_a (sin(pi dx_a)/pi)^2,
/// which is |x - c|^2 + O(|x - c|^4) near the center.
double periodic_dist2(const std::vector<double>& x, const std::vector<double>& c) {
    double acc = 0.0;
    for (size_t a = 0; a < x.size(); ++a) {
        const double s = std::sin(kPi * (x[a] - c[a])) / kPi;
        acc += s * s;
    }
    return acc;
}

std::vector<double> default_center(int axes) { return std::vector<double>(axes, 0.5); }

}  // namespace

bool RhsFamily::known(const std::string& name) {
    return name == "constant" || name == "bump" || name == "two_bump" || name == "balanced";
}

ScalarField make_rhs(const TorusGrid& grid, const RhsFamily& family) {
    if (!RhsFamily::known(family.name))
        throw std::invalid_argument("make_rhs: unknown family " + family.name);
    if (!(family.sigma > 0.0)) throw std::invalid_argument("make_rhs: sigma must be positive");
    const int axes = grid.axes();
    std::vector<double> c = family.center.empty() ? default_center(axes) : family.center;
    if (static_cast<int>(c.size()) != axes)
        throw std::invalid_argument("make_rhs: center has wrong dimension");

    ScalarField F(grid);
    std::vector<int> idx(static_cast<size_t>(axes));
    std::vector<double> x(static_cast<size_t>(axes));
    const double a = family.amplitude;
    const double s2 = family.sigma * family.sigma;

    std::vector<double> c2 = c;  // second bump center, offset along axis 0
    c2[0] = c2[0] + 0.31 - std::floor(c2[0] + 0.31);

    double gsum = 0.0;
    if (family.name == "balanced") {
        for (size_t p = 0; p < grid.points(); ++p) {
            grid.unflatten(p, idx.data());
            for (int ax = 0; ax < axes; ++ax) x[static_cast<size_t>(ax)] = grid.coord(idx[ax]);
            gsum += std::exp(-periodic_dist2(x, c) / s2);
        }
        gsum /= double(grid.points());
    }

    for (size_t p = 0; p < grid.points(); ++p) {
        grid.unflatten(p, idx.data());
        for (int ax = 0; ax < axes; ++ax) x[static_cast<size_t>(ax)] = grid.coord(idx[ax]);
        double v = 0.0;
        if (family.name == "constant") {
            v = a;
        } else if (family.name == "bump") {
            v = std::log(1.0 + a * std::exp(-periodic_dist2(x, c) / s2));
        } else if (family.name == "two_bump") {
            v = std::log(1.0 + a * (std::exp(-periodic_dist2(x, c) / s2) +
                                    0.7 * std::exp(-periodic_dist2(x, c2) / s2)));
        } else {  // balanced: mean-zero before the b-adjustment
            v = a * (std::exp(-periodic_dist2(x, c) / s2) - gsum);
        }
        F.values[p] = v;
    }
    return F;
}

double norm_entropy(const ScalarField& F, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("norm_entropy: p must be positive");
    double acc = 0.0;
    for (double f : F.values) acc += std::pow(std::abs(2.0 * f), p) * std::exp(2.0 * f);
    return acc / double(F.values.size());
}

double lq_norm(const ScalarField& F, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("lq_norm: q must be positive");
    double acc = 0.0;
    for (double f : F.values) acc += std::exp(q * f);
    return std::pow(acc / double(F.values.size()), 1.0 / q);
}

NormalizeMode parse_normalize_mode(const std::string& name) {
    if (name == "raw") return NormalizeMode::raw;
    if (name == "fix_entropy") return NormalizeMode::fix_entropy;
    if (name == "fix_lq") return NormalizeMode::fix_lq;
    throw std::invalid_argument("unknown normalization mode: " + name);
}

double normalize_family(const TorusGrid& grid, RhsFamily& family, NormalizeMode mode,
                        double p_or_q, double target) {
    auto norm_of = [&](double amp) {
        RhsFamily f = family;
        f.amplitude = amp;
        const ScalarField F = make_rhs(grid, f);
        return mode == NormalizeMode::fix_entropy ? norm_entropy(F, p_or_q)
                                                  : lq_norm(F, p_or_q);
    };
    if (mode == NormalizeMode::raw) {
        const ScalarField F = make_rhs(grid, family);
        return norm_entropy(F, p_or_q);
    }
    if (!(target > 0.0)) throw std::invalid_argument("normalize_family: target must be positive");

    // For fix_lq the norm at amplitude 0 is 1 (e^0); reject unreachable targets.
    double lo = 0.0, hi = 1.0;
    double nlo = norm_of(lo);
    if (nlo >= target)
        throw std::invalid_argument("normalize_family: target below the amplitude-0 norm");
    double nhi = norm_of(hi);
    int guard = 0;
    while (nhi < target) {
        hi *= 2.0;
        nhi = norm_of(hi);
        if (++guard > 60)
            throw std::runtime_error("normalize_family: target norm not reachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double nm = norm_of(mid);
        if (nm < target)
            lo = mid;
        else
            hi = mid;
        if (std::abs(nm - target) <= 1e-8 * target) {
            family.amplitude = mid;
            return nm;
        }
    }
    family.amplitude = 0.5 * (lo + hi);
    const double achieved = norm_of(family.amplitude);
    if (std::abs(achieved - target) > 1e-6 * target)
        throw std::runtime_error("normalize_family: norm match did not reach 1e-6 relative");
    return achieved;
}

ProbeReport run_probe(const ProbeConfig& cfg, const HypercomplexFrame& frame) {
    if (cfg.mode == NormalizeMode::fix_entropy && !(cfg.p > 2.0 * cfg.n))
        throw std::invalid_argument("run_probe: fix_entropy requires p > 2n");
    if (!RhsFamily::known(cfg.family.name))
        throw std::invalid_argument("run_probe: unknown family " + cfg.family.name);

    OperatorSpec spec;
    if (cfg.operator_name == "qma")
        spec = qma_operator(cfg.n);
    else if (cfg.operator_name == "laplace")
        spec = laplace_operator(cfg.n);
    else if (cfg.operator_name.rfind("sigma", 0) == 0)
        spec = sigma_operator(cfg.n, std::stoi(cfg.operator_name.substr(5)));
    else
        throw std::invalid_argument("run_probe: unknown operator " + cfg.operator_name);

    struct Slot {
        std::optional<ProbeRow> row;
        std::optional<ProbeFlagged> flagged;
    };
    std::vector<Slot> slots(cfg.sigmas.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cfg.sigmas.size()) return;
            const double sigma = cfg.sigmas[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                TorusGrid grid(cfg.n, cfg.N);
                RhsFamily fam = cfg.family;
                fam.sigma = sigma;
                const double p_or_q =
                    cfg.mode == NormalizeMode::fix_entropy ? cfg.p : cfg.q;
                normalize_family(grid, fam, cfg.mode, p_or_q, cfg.target);
                const ScalarField F = make_rhs(grid, fam);

                const SolveResult res = solve(spec, F, frame, cfg.solve);
                const SolutionCheck chk = verify_solution(spec, F, res, frame);
                if (chk.forward_backward_err > 1e-6)
                    throw SolveFailure("emission recheck failed: forward-backward error " +
                                           format_double(chk.forward_backward_err),
                                       res.residual_inf, res.newton_iters);

                ProbeRow row;
                row.family = fam.name;
                row.sigma = sigma;
                row.N = cfg.N;
                row.entropy_norm = norm_entropy(F, cfg.p);
                row.lq_norm = lq_norm(F, cfg.q);
                row.b = res.b;
                row.neg_inf_phi = -res.phi.min();
                row.residual = res.residual_inf;
                row.l1_norm = res.phi.l1();
                row.fb_err = chk.forward_backward_err;
                row.max_pairing_gap = std::max(res.max_pairing_gap, chk.max_pairing_gap);
                row.runtime_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                slots[i].row = std::move(row);
            } catch (const std::exception& e) {
                slots[i].flagged = ProbeFlagged{sigma, e.what()};
            }
        }
    };

    const int nw = std::max(1, std::min<int>(cfg.workers, static_cast<int>(cfg.sigmas.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    ProbeReport report;
    for (auto& slot : slots) {
        if (slot.row) {
            report.empirical_C = std::max(report.empirical_C, slot.row->neg_inf_phi);
            report.rows.push_back(std::move(*slot.row));
        } else if (slot.flagged) {
            report.flagged.push_back(std::move(*slot.flagged));
        }
    }
    return report;
}

std::string probe_csv(const ProbeReport& report) {
    std::string out = csv_join(
        {"family", "sigma", "N", "entropy_norm_p", "Lq_norm", "b", "neg_inf_phi", "residual",
         "l1_norm"});
    for (const auto& r : report.rows)
        out += csv_join({r.family, format_double(r.sigma), std::to_string(r.N),
                         format_double(r.entropy_norm), format_double(r.lq_norm),
                         format_double(r.b), format_double(r.neg_inf_phi),
                         format_double(r.residual), format_double(r.l1_norm)});
    return out;
}

std::string probe_svg(const ProbeReport& report) {
    SvgPanel left, right;
    left.title = "uniform bound vs concentration";
    left.x_label = "sigma";
    left.y_label = "-inf phi";
    left.log_x = true;
    SvgSeries s1{"-inf phi", {}};
    for (const auto& r : report.rows) s1.points.emplace_back(r.sigma, r.neg_inf_phi);
    left.series.push_back(std::move(s1));

    right.title = "uniform bound vs right-hand-side norms";
    right.x_label = "norm";
    right.y_label = "-inf phi";
    SvgSeries s2{"entropy norm", {}};
    SvgSeries s3{"Lq norm", {}};
    for (const auto& r : report.rows) {
        s2.points.emplace_back(r.entropy_norm, r.neg_inf_phi);
        s3.points.emplace_back(r.lq_norm, r.neg_inf_phi);
    }
    right.series.push_back(std::move(s2));
    right.series.push_back(std::move(s3));
    return render_svg_scatter({left, right});
}

}  // namespace qmalab
