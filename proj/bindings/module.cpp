#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subdif/experiment.hpp"
#include "subdif/mittag_leffler.hpp"
#include "subdif/verify.hpp"

namespace py = pybind11;
using namespace subdif;

namespace {

KernelSide side_from(const std::string& s) {
    if (s == "k" || s == "K") return KernelSide::K;
    if (s == "l" || s == "L") return KernelSide::L;
    throw std::invalid_argument("side must be 'k' or 'l'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonlocal-in-time degenerate diffusion: PC kernel calculus, L1-type "
              "time stepping, 1-D finite-volume solver, and theorem-derived checks";

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, int>(), py::arg("horizon"), py::arg("steps"))
        .def_readonly("horizon", &TimeGrid::horizon)
        .def_readonly("steps", &TimeGrid::steps)
        .def_property_readonly("tau", &TimeGrid::tau)
        .def("node", &TimeGrid::node);

    py::class_<Mesh1D>(m, "Mesh1D")
        .def(py::init<double, int>(), py::arg("length"), py::arg("cells"))
        .def_readonly("length", &Mesh1D::length)
        .def_readonly("cells", &Mesh1D::cells)
        .def_property_readonly("h", &Mesh1D::h)
        .def_property_readonly("interior", &Mesh1D::interior)
        .def("node", &Mesh1D::node)
        .def_property_readonly("poincare_constant", &Mesh1D::poincare_constant);

    py::class_<KernelPair>(m, "KernelPair")
        .def_static("fractional", &KernelPair::fractional, py::arg("alpha"))
        .def_static("tempered", &KernelPair::tempered, py::arg("alpha"), py::arg("tempering"))
        .def_static("distributed_order", &KernelPair::distributed_order)
        .def("eval", [](const KernelPair& p, const std::string& side, double t) {
            return p.eval(side_from(side), t);
        });

    py::class_<DiscreteKernel>(m, "DiscreteKernel")
        .def(py::init<TimeGrid, std::vector<double>>())
        .def_readonly("grid", &DiscreteKernel::grid)
        .def_readonly("weights", &DiscreteKernel::weights)
        .def("l1_norm", &DiscreteKernel::l1_norm);

    m.def("sample_cell_averages",
          [](const KernelPair& p, const std::string& side, const TimeGrid& g) {
              return sample_cell_averages(p, side_from(side), g);
          },
          py::arg("pair"), py::arg("side"), py::arg("grid"));
    m.def("convolve", [](const DiscreteKernel& a, const std::vector<double>& v) {
        return convolve(a, v);
    });
    m.def("kernel_convolve", &kernel_convolve);

    py::class_<ResolventSet>(m, "ResolventSet")
        .def_readonly("gamma", &ResolventSet::gamma)
        .def_readonly("h", &ResolventSet::h)
        .def_readonly("s", &ResolventSet::s)
        .def_readonly("r", &ResolventSet::r);
    m.def("resolvent_kernel", &resolvent_kernel, py::arg("l"), py::arg("gamma"));
    m.def("regularized_kernel", &regularized_kernel);

    py::class_<PcCheck>(m, "PcCheck")
        .def_readonly("mean_abs_defect", &PcCheck::mean_abs_defect)
        .def_readonly("max_abs_defect", &PcCheck::max_abs_defect)
        .def_readonly("k_monotonicity_defect", &PcCheck::k_monotonicity_defect)
        .def_readonly("l_negativity_defect", &PcCheck::l_negativity_defect)
        .def_readonly("pass_", &PcCheck::pass)
        .def_readonly("tolerance", &PcCheck::tolerance);
    m.def("verify_pc_pair", &verify_pc_pair, py::arg("pair"), py::arg("grid"), py::arg("tol"));
    m.def("yosida_convergence",
          [](const DiscreteKernel& l, const std::vector<double>& f, const std::vector<double>& g) {
              return yosida_convergence(l, f, g);
          });

    py::class_<NonlocalOperator>(m, "NonlocalOperator").def(py::init<DiscreteKernel>());
    m.def("nonlocal_apply", [](const NonlocalOperator& op, const std::vector<double>& v, double v0) {
        return apply(op, v, v0);
    });
    m.def("convexity_margin",
          [](const NonlocalOperator& op, const std::function<double(double)>& H,
             const std::function<double(double)>& Hp, const std::vector<double>& v, double v0) {
              return convexity_margin(op, H, Hp, v, v0);
          });

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("identity", &Nonlinearity::identity)
        .def_static("porous_medium", &Nonlinearity::porous_medium, py::arg("m"))
        .def("phi", [](const Nonlinearity& f, double r) { return f.phi(r); })
        .def("dphi", [](const Nonlinearity& f, double r) { return f.dphi(r); })
        .def("primitive", [](const Nonlinearity& f, double r) { return f.primitive(r); })
        .def_readonly("mu", &Nonlinearity::mu)
        .def_readonly("R", &Nonlinearity::R);
    m.def("truncate", &subdif::truncate, py::arg("phi"), py::arg("M"));
    m.def("regularize", &subdif::regularize, py::arg("phi"), py::arg("eps"));

    m.def("hminus1_norm", [](const Mesh1D& mesh, const std::vector<double>& w) {
        return hminus1_norm(mesh, w);
    });
    py::class_<FieldNorms>(m, "FieldNorms")
        .def_readonly("l1", &FieldNorms::l1)
        .def_readonly("l2", &FieldNorms::l2)
        .def_readonly("linf", &FieldNorms::linf)
        .def_readonly("grad_l2", &FieldNorms::grad_l2);
    m.def("space_norms", [](const Mesh1D& mesh, const std::vector<double>& u) {
        return space_norms(mesh, u);
    });

    py::class_<StepDiagnostics>(m, "StepDiagnostics")
        .def_readonly("iterations", &StepDiagnostics::iterations)
        .def_readonly("residual", &StepDiagnostics::residual)
        .def_readonly("eps", &StepDiagnostics::eps);
    py::class_<ContinuationRecord>(m, "ContinuationRecord")
        .def_readonly("eps", &ContinuationRecord::eps)
        .def_readonly("sup_norm", &ContinuationRecord::sup_norm)
        .def_readonly("l2_dist_prev", &ContinuationRecord::l2_dist_prev);
    py::class_<Solution>(m, "Solution")
        .def_readonly("u", &Solution::u)
        .def_readonly("v", &Solution::v)
        .def_readonly("steps", &Solution::steps)
        .def_readonly("continuation", &Solution::continuation)
        .def_readonly("eps_final", &Solution::eps_final)
        .def_readonly("truncation_bound", &Solution::truncation_bound)
        .def_readonly("truncation_active", &Solution::truncation_active)
        .def_readonly("escalations", &Solution::escalations);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("mesh", &ProblemSpec::mesh)
        .def_readonly("grid", &ProblemSpec::grid)
        .def_readonly("u0", &ProblemSpec::u0);
    m.def("build_problem",
          [](const Mesh1D& mesh, const TimeGrid& grid, const KernelPair& pair, double coeff,
             const Nonlinearity& phi, const std::vector<double>& u0,
             const std::function<double(double, double)>& forcing) {
              return ProblemSpec::from_pair(mesh, grid, pair, CoefficientField::constant(coeff), phi,
                                            u0, forcing ? forcing : [](double, double) { return 0.0; });
          },
          py::arg("mesh"), py::arg("grid"), py::arg("pair"), py::arg("coeff"), py::arg("phi"),
          py::arg("u0"), py::arg("forcing") = nullptr);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("picard_tol", &SolverConfig::picard_tol)
        .def_readwrite("picard_maxit", &SolverConfig::picard_maxit)
        .def_readwrite("damping", &SolverConfig::damping)
        .def_readwrite("eps_schedule", &SolverConfig::eps_schedule);
    m.def("solve", [](const ProblemSpec& p, const SolverConfig& cfg) { return solve(p, cfg); },
          py::arg("problem"), py::arg("config") = SolverConfig{});

    m.def("mittag_leffler", &mittag_leffler, py::arg("alpha"), py::arg("z"));

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_readonly("lhs", &CheckResult::lhs)
        .def_readonly("rhs", &CheckResult::rhs)
        .def_readonly("margin", &CheckResult::margin)
        .def_readonly("tolerance", &CheckResult::tolerance)
        .def_readonly("pass_", &CheckResult::pass)
        .def_readonly("note", &CheckResult::note);
    m.def("energy_check", &energy_check);
    m.def("translation_modulus_check", &translation_modulus_check);
    m.def("convexity_suite", &convexity_suite, py::arg("op"), py::arg("trials"), py::arg("seed"));
    m.def("check_exponents", [](double p, double q1, double q2, int d) {
        const ExponentCheck c = check_exponents(p, q1, q2, d);
        py::dict out;
        out["ok"] = c.ok;
        out["beta"] = c.hypotheses.beta;
        out["violation"] = c.violation;
        return out;
    });

    m.def("run_experiment",
          [](const std::string& config_path, const std::string& out_dir, std::int64_t seed,
             bool quiet) { return run(config_path, out_dir, seed, quiet); },
          py::arg("config_path"), py::arg("out_dir") = std::string{}, py::arg("seed") = -1,
          py::arg("quiet") = true);
}
