#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmalab/comparison.hpp"
#include "qmalab/forms.hpp"
#include "qmalab/gp.hpp"
#include "qmalab/operators.hpp"
#include "qmalab/probe.hpp"
#include "qmalab/solver.hpp"

namespace py = pybind11;
using namespace qmalab;

namespace {

QuaternionMatrix quat_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> q) {
    if (q.ndim() != 3 || q.shape(0) != q.shape(1) || q.shape(2) != 4)
        throw std::invalid_argument("quaternion matrix must have shape (n, n, 4)");
    const int n = static_cast<int>(q.shape(0));
    QuaternionMatrix H(n);
    auto r = q.unchecked<3>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            H.at(i, j) = Quaternion(r(i, j, 0), r(i, j, 1), r(i, j, 2), r(i, j, 3));
    return H;
}

py::array_t<double> quat_to_array(const QuaternionMatrix& H) {
    const int n = H.n();
    py::array_t<double> out({n, n, 4});
    auto w = out.mutable_unchecked<3>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Quaternion& v = H.at(i, j);
            w(i, j, 0) = v.w;
            w(i, j, 1) = v.x;
            w(i, j, 2) = v.y;
            w(i, j, 3) = v.z;
        }
    return out;
}

ScalarField field_from_array(const TorusGrid& grid, py::array_t<double> flat) {
    auto buf = flat.request();
    if (static_cast<size_t>(buf.size) != grid.points())
        throw std::invalid_argument("field array size does not match the grid");
    std::vector<double> v(grid.points());
    std::memcpy(v.data(), buf.ptr, grid.points() * sizeof(double));
    return {grid, std::move(v)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quaternionic Monge-Ampere laboratory: flat-model hypercomplex linear algebra, "
              "operator comparisons, spectral torus solver, auxiliary-equation machinery";

    py::class_<HypercomplexFrame>(m, "HypercomplexFrame")
        .def_property_readonly("n", &HypercomplexFrame::n)
        .def_property_readonly("I_mat", &HypercomplexFrame::I_mat)
        .def_property_readonly("J_mat", &HypercomplexFrame::J_mat)
        .def_property_readonly("K_mat", &HypercomplexFrame::K_mat)
        .def_property_readonly("complex_basis", &HypercomplexFrame::complex_basis)
        .def_property_readonly("j_complex", &HypercomplexFrame::j_complex)
        .def("invariant_error", &HypercomplexFrame::invariant_error);

    m.def("standard_frame", &HypercomplexFrame::standard, py::arg("n"));

    m.def(
        "decompose",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> H) {
            const QuaternionMatrix q = quat_from_array(H);
            const auto frame = HypercomplexFrame::standard(q.n());
            auto [h, om] = decompose(q, frame);
            return py::make_tuple(h.A, om.W);
        },
        py::arg("H"), "split a quaternion-hermitian matrix into (hermitian, hyperhermitian) parts");

    m.def(
        "recompose",
        [](const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& W) {
            const int n = static_cast<int>(h.rows()) / 2;
            const auto frame = HypercomplexFrame::standard(n);
            return quat_to_array(recompose({n, h}, {n, W}, frame));
        },
        py::arg("h"), py::arg("W"));

    m.def(
        "pfaffian", [](const Eigen::MatrixXcd& W) { return pfaffian(W); }, py::arg("W"),
        "Pfaffian of an even antisymmetric complex matrix (Parlett-Reid)");

    m.def("volume_constant", &volume_constant, py::arg("n"));

    m.def(
        "j_pullback",
        [](const Eigen::MatrixXcd& A) {
            const int n = static_cast<int>(A.rows()) / 2;
            return j_pullback({n, A}, HypercomplexFrame::standard(n)).A;
        },
        py::arg("A"));

    m.def(
        "hyperhermitian_part",
        [](const Eigen::MatrixXcd& A) {
            const int n = static_cast<int>(A.rows()) / 2;
            return hyperhermitian_part({n, A}, HypercomplexFrame::standard(n)).A;
        },
        py::arg("A"));

    m.def(
        "check_lemma31",
        [](const Eigen::MatrixXcd& A) {
            const int n = static_cast<int>(A.rows()) / 2;
            const auto r = check_lemma31({n, A}, HypercomplexFrame::standard(n));
            py::dict d;
            d["lhs_det"] = r.lhs_det;
            d["rhs_det"] = r.rhs_det;
            d["margin"] = r.margin;
            d["holds"] = r.holds();
            return d;
        },
        py::arg("A"));

    m.def(
        "check_prop32",
        [](const Eigen::MatrixXcd& A) {
            const int n = static_cast<int>(A.rows()) / 2;
            const auto r = check_prop32({n, A}, HypercomplexFrame::standard(n));
            py::dict d;
            d["quat_side"] = r.quat_side;
            d["complex_side"] = r.complex_side;
            d["margin"] = r.margin;
            d["pfaffian_rel_err"] = r.pfaffian_rel_err;
            d["holds"] = r.holds();
            return d;
        },
        py::arg("A"));

    py::class_<OperatorSpec>(m, "OperatorSpec")
        .def_readonly("name", &OperatorSpec::name)
        .def_readonly("n", &OperatorSpec::n)
        .def_readonly("gamma", &OperatorSpec::gamma)
        .def("evaluate", &OperatorSpec::evaluate, py::arg("lam"))
        .def("gradient", &OperatorSpec::grad_checked, py::arg("lam"))
        .def("in_cone",
             [](const OperatorSpec& s, const std::vector<double>& lam) { return s.in_cone(lam); })
        .def("cone_margin", [](const OperatorSpec& s, const std::vector<double>& lam) {
            return s.cone_margin(lam);
        });

    m.def("qma_operator", &qma_operator, py::arg("n"));
    m.def("laplace_operator", &laplace_operator, py::arg("n"));
    m.def("sigma_operator", &sigma_operator, py::arg("n"), py::arg("k"));
    m.def("max_eigenvalue_operator", &max_eigenvalue_operator, py::arg("n"));
    m.def("linearization_coeffs", &linearization_coeffs, py::arg("spec"), py::arg("lam"));

    m.def(
        "check_structural",
        [](const OperatorSpec& spec, int samples, uint64_t seed) {
            const auto r = check_structural(spec, samples, seed);
            py::dict d;
            d["samples"] = r.samples;
            d["passed"] = r.passed;
            d["ok"] = r.ok();
            d["min_product"] = r.min_product;
            d["max_grad_rel_err"] = r.max_grad_rel_err;
            if (r.violation) {
                d["violation"] = r.violation->what;
                d["witness"] = r.violation->witness;
            }
            return d;
        },
        py::arg("spec"), py::arg("samples") = 1000, py::arg("seed") = 7);

    m.def(
        "eigenvalues",
        [](const Eigen::MatrixXcd& W_phi, const Eigen::MatrixXcd& W) {
            const int n = static_cast<int>(W.rows()) / 2;
            const auto frame = HypercomplexFrame::standard(n);
            const EigTuple e = eigenvalues({n, W_phi}, {n, W}, frame);
            return py::make_tuple(e.lambda, e.pairing_gap_rel);
        },
        py::arg("W_phi"), py::arg("W"),
        "paired, deduplicated eigenvalues of a hyperhermitian pencil");

    m.def(
        "solve_torus",
        [](int n, int N, py::array_t<double> F_flat, const std::string& op, double tol,
           int max_iters, bool force) {
            const auto frame = HypercomplexFrame::standard(n);
            TorusGrid grid(n, N);
            const ScalarField F = field_from_array(grid, F_flat);
            OperatorSpec spec = op == "laplace" ? laplace_operator(n) : qma_operator(n);
            SolveOptions opts;
            opts.tol = tol;
            opts.max_iters = max_iters;
            opts.force = force;
            const SolveResult res = solve(spec, F, frame, opts);
            const SolutionCheck chk = verify_solution(spec, F, res, frame);
            py::dict d;
            d["phi"] = py::array_t<double>(static_cast<py::ssize_t>(res.phi.values.size()),
                                           res.phi.values.data());
            d["b"] = res.b;
            d["residual_inf"] = res.residual_inf;
            d["newton_iters"] = res.newton_iters;
            d["min_eig_margin"] = res.min_eig_margin;
            d["max_pairing_gap"] = res.max_pairing_gap;
            d["forward_backward_err"] = chk.forward_backward_err;
            return d;
        },
        py::arg("n"), py::arg("N"), py::arg("F"), py::arg("op") = "qma", py::arg("tol") = 1e-8,
        py::arg("max_iters") = 50, py::arg("force") = false);

    m.def(
        "make_rhs",
        [](int n, int N, const std::string& family, double sigma, double amplitude) {
            TorusGrid grid(n, N);
            RhsFamily fam;
            fam.name = family;
            fam.sigma = sigma;
            fam.amplitude = amplitude;
            const ScalarField F = make_rhs(grid, fam);
            return py::array_t<double>(static_cast<py::ssize_t>(F.values.size()),
                                       F.values.data());
        },
        py::arg("n"), py::arg("N"), py::arg("family"), py::arg("sigma") = 0.2,
        py::arg("amplitude") = 1.0);

    m.def(
        "norm_entropy",
        [](py::array_t<double> F, double p) {
            auto buf = F.request();
            const double* ptr = static_cast<const double*>(buf.ptr);
            double acc = 0.0;
            for (py::ssize_t i = 0; i < buf.size; ++i)
                acc += std::pow(std::abs(2.0 * ptr[i]), p) * std::exp(2.0 * ptr[i]);
            return acc / double(buf.size);
        },
        py::arg("F"), py::arg("p"));

    m.def("tau", &tau, py::arg("k"), py::arg("x"));

    m.def(
        "radial_cma_dirichlet",
        [](const std::function<double(double)>& g, int mdim, double S, int nodes) {
            const RadialSolution sol = radial_cma_dirichlet(g, mdim, S, nodes);
            py::dict d;
            d["s"] = sol.s;
            d["psi"] = sol.psi;
            d["uprime"] = sol.uprime;
            d["ma_mass"] = ma_mass(sol, mdim);
            return d;
        },
        py::arg("g"), py::arg("m"), py::arg("S"), py::arg("nodes") = 513);

    m.def(
        "gp_sweep_constant",
        [](int n, double r, int nodes, const std::vector<double>& s_fracs,
           const std::vector<double>& ks) {
            const auto rows = gp_claim_sweep(constant_radial_instance(BallModel(n, r, nodes)),
                                             s_fracs, ks);
            py::list out;
            for (const auto& row : rows) {
                py::dict d;
                d["s"] = row.s_param;
                d["k"] = row.k;
                d["A_sk"] = row.A_sk;
                d["C_empirical"] = row.C_empirical;
                d["min_margin"] = row.min_margin;
                out.append(d);
            }
            return out;
        },
        py::arg("n") = 1, py::arg("r") = 0.25, py::arg("nodes") = 513,
        py::arg("s_fracs") = std::vector<double>{0.25, 0.5, 1.0},
        py::arg("ks") = std::vector<double>{10.0, 100.0});
}
