#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmalab/operators.hpp"
#include "qmalab/solver.hpp"
#include "qmalab/torus.hpp"

namespace qmalab {

/// Closed-form right-hand-side families on the torus, parameterized by a
/// concentration scale sigma and an amplitude knob that the normalization
/// modes adjust.
struct RhsFamily {
    std::string name = "bump";  // constant | bump | two_bump | balanced
    double sigma = 0.2;
    double amplitude = 1.0;
    std::vector<double> center;  // defaults to the torus midpoint

    static bool known(const std::string& name);
};

ScalarField make_rhs(const TorusGrid& grid, const RhsFamily& family);

/// Entropy norm of e^{2F}: grid mean of |2F|^p e^{2F}.
double norm_entropy(const ScalarField& F, double p);

/// L^q norm of e^F: (grid mean of e^{qF})^{1/q}.
double lq_norm(const ScalarField& F, double q);

enum class NormalizeMode { raw, fix_entropy, fix_lq };
NormalizeMode parse_normalize_mode(const std::string& name);

/// Adjusts family.amplitude so the requested norm matches `target` to 1e-8
/// relative (bracketed bisection); returns the matched norm.
double normalize_family(const TorusGrid& grid, RhsFamily& family, NormalizeMode mode,
                        double p_or_q, double target);

struct ProbeRow {
    std::string family;
    double sigma = 0.0;
    int N = 0;
    double entropy_norm = 0.0;
    double lq_norm = 0.0;
    double b = 0.0;
    double neg_inf_phi = 0.0;
    double residual = 0.0;
    double l1_norm = 0.0;
    double runtime_s = 0.0;  // logged, never written to the CSV
    double fb_err = 0.0;     // forward-backward recheck at emission
    double max_pairing_gap = 0.0;
};

struct ProbeFlagged {
    double sigma = 0.0;
    std::string reason;
};

struct ProbeConfig {
    int n = 1;
    int N = 16;
    std::string operator_name = "qma";
    RhsFamily family;
    std::vector<double> sigmas = {0.4, 0.2, 0.1};
    NormalizeMode mode = NormalizeMode::fix_entropy;
    double p = 3.0;
    double q = 3.0;
    double target = 1.0;
    int workers = 2;
    uint64_t seed = 0;
    SolveOptions solve;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;        // converged solves only
    std::vector<ProbeFlagged> flagged;
    double empirical_C = 0.0;          // max -inf phi over converged rows
};

/// Runs the sigma sweep in a worker pool (one independent solve per row),
/// re-checking forward-backward consistency on every emitted row.
ProbeReport run_probe(const ProbeConfig& cfg, const HypercomplexFrame& frame);

std::string probe_csv(const ProbeReport& report);
std::string probe_svg(const ProbeReport& report);

}  // namespace qmalab
