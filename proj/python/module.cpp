#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sectoria/boundary_ops.hpp"
#include "sectoria/evolution.hpp"
#include "sectoria/invariance.hpp"
#include "sectoria/json_io.hpp"
#include "sectoria/regularization.hpp"
#include "sectoria/version.hpp"

namespace py = pybind11;
using namespace sectoria;

namespace {

FormTriple make_triple(const Mat& form, const Mat& jmap,
                       std::optional<Mat> gram_v, std::optional<Mat> gram_h) {
  FormTriple t;
  t.form = form;
  t.jmap = jmap;
  t.V.dim = form.cols();
  if (gram_v) t.V.gram = *gram_v;
  t.H.dim = jmap.rows();
  if (gram_h) t.H.gram = *gram_h;
  t.validate();
  return t;
}

GridProblem make_interval(double length, int cells, const Vec& coefficients,
                          const std::string& bc, const RVec& beta) {
  GridProblem p = GridProblem::interval(length, cells, 1.0);
  if (coefficients.size() == 1) {
    for (auto& c : p.coefficients) c(0, 0) = coefficients(0);
  } else if (coefficients.size() == cells) {
    for (int c = 0; c < cells; ++c) p.coefficients[c](0, 0) = coefficients(c);
  } else {
    throw InvalidInput("coefficients must be scalar or one per cell");
  }
  if (bc == "dirichlet") p.bc = BoundaryCondition::dirichlet();
  else if (bc == "neumann") p.bc = BoundaryCondition::neumann();
  else if (bc == "robin") p.bc = BoundaryCondition::robin(beta);
  else throw InvalidInput("bc must be dirichlet, neumann or robin");
  return p;
}

}  // namespace

PYBIND11_MODULE(_sectoria, m) {
  m.doc() = "Sectorial forms, associated m-sectorial operators and their "
            "holomorphic semigroups on finite-dimensional spaces.";
  m.attr("__version__") = version_string;

  py::register_exception<MathRefusal>(m, "MathRefusal");
  py::register_exception<InvalidInput>(m, "InvalidInput");

  py::class_<HilbertSpaceSpec>(m, "HilbertSpaceSpec")
      .def_readonly("dim", &HilbertSpaceSpec::dim)
      .def_property_readonly("gram", &HilbertSpaceSpec::gram_matrix);

  py::class_<FormTriple>(m, "FormTriple")
      .def(py::init(&make_triple), py::arg("form"), py::arg("jmap"),
           py::arg("gram_v") = std::nullopt, py::arg("gram_h") = std::nullopt)
      .def_readonly("form", &FormTriple::form)
      .def_readonly("jmap", &FormTriple::jmap)
      .def_readonly("V", &FormTriple::V)
      .def_readonly("H", &FormTriple::H)
      .def("continuity_constant", &FormTriple::continuity_constant);

  py::class_<SectorCertificate>(m, "SectorCertificate")
      .def_readonly("vertex", &SectorCertificate::vertex)
      .def_readonly("semi_angle", &SectorCertificate::semi_angle)
      .def_readonly("tan_theta", &SectorCertificate::tan_theta)
      .def_readonly("omega", &SectorCertificate::omega)
      .def_readonly("mu", &SectorCertificate::mu)
      .def("elliptic", &SectorCertificate::elliptic);

  py::class_<DecompositionBundle>(m, "DecompositionBundle")
      .def_readonly("ker_basis", &DecompositionBundle::ker_basis)
      .def_readonly("va_basis", &DecompositionBundle::va_basis)
      .def_readonly("direct_sum", &DecompositionBundle::direct_sum)
      .def_readonly("joint_condition", &DecompositionBundle::joint_condition);

  py::class_<SeminormedFormData>(m, "SeminormedFormData")
      .def(py::init([](const Mat& form, const Mat& jmap, double gamma) {
             SeminormedFormData s;
             s.form = form;
             s.jmap = jmap;
             s.H = HilbertSpaceSpec::euclidean(jmap.rows());
             s.gamma = gamma;
             s.validate();
             return s;
           }),
           py::arg("form"), py::arg("jmap"), py::arg("gamma") = 0.0);

  py::class_<QuotientCompletion>(m, "QuotientCompletion")
      .def_readonly("triple", &QuotientCompletion::triple)
      .def_readonly("q", &QuotientCompletion::q);

  py::class_<OperatorBundle>(m, "OperatorBundle")
      .def_readonly("A", &OperatorBundle::A)
      .def_readonly("lambda_ref", &OperatorBundle::lambda_ref)
      .def_readonly("cert", &OperatorBundle::cert)
      .def_readonly("decomposition", &OperatorBundle::decomposition)
      .def("resolvent_at", &OperatorBundle::resolvent_at);

  py::class_<ClassicalFormResult>(m, "ClassicalFormResult")
      .def_readonly("a_c", &ClassicalFormResult::a_c)
      .def_readonly("h_c", &ClassicalFormResult::h_c)
      .def_readonly("C", &ClassicalFormResult::C)
      .def_readonly("shift", &ClassicalFormResult::shift);

  m.def("sector_fit", &sector_fit);
  m.def("check_j_elliptic", &check_j_elliptic);
  m.def("certify", &certify);
  m.def("kernel_and_Va", &kernel_and_Va);
  m.def("quotient_completion", &quotient_completion);
  m.def("resolvent", &resolvent, py::arg("triple"), py::arg("lam"));
  m.def("extract_operator", &extract_operator);
  m.def("extract_operator_Va", &extract_operator_Va);
  m.def("extract_incomplete", &extract_incomplete);
  m.def("adjoint_operator", &adjoint_operator);
  m.def("classical_form", &classical_form);
  m.def("regular_part", &regular_part);

  m.def("semigroup_apply",
        py::overload_cast<const Mat&, Complex, const Vec&, double>(
            &semigroup_apply),
        py::arg("A"), py::arg("z"), py::arg("x"), py::arg("theta") = 0.0);
  m.def("semigroup_matrix", &semigroup_matrix, py::arg("A"), py::arg("z"),
        py::arg("theta") = 0.0);
  m.def("quasi_contractivity_check",
        py::overload_cast<const Mat&, double, double, int, int, const Mat&>(
            &quasi_contractivity_check),
        py::arg("A"), py::arg("omega"), py::arg("theta_prime"),
        py::arg("n_radius") = 20, py::arg("n_angle") = 20,
        py::arg("gram") = Mat());

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("n_values", &ConvergenceReport::n_values)
      .def_readonly("strong_errors", &ConvergenceReport::strong_errors)
      .def_readonly("norm_errors", &ConvergenceReport::norm_errors)
      .def("to_csv", &ConvergenceReport::to_csv);
  m.def("build_regularized", &build_regularized);
  m.def("convergence_sweep", &convergence_sweep, py::arg("a"), py::arg("b"),
        py::arg("lam"), py::arg("f"), py::arg("n_list"));
  m.def("dyadic_n", &dyadic_n, py::arg("n_max") = 1024);

  py::class_<ConvexSetDescriptor>(m, "ConvexSetDescriptor")
      .def_static("real_subspace", &ConvexSetDescriptor::real_subspace)
      .def_static("positive_cone", &ConvexSetDescriptor::positive_cone)
      .def_static("upper_box", &ConvexSetDescriptor::upper_box)
      .def_static("weighted_box", &ConvexSetDescriptor::weighted_box)
      .def_property_readonly("name", &ConvexSetDescriptor::name);
  py::class_<CriterionReport>(m, "CriterionReport")
      .def_readonly("worst_margin", &CriterionReport::worst_margin)
      .def_readonly("pass_", &CriterionReport::pass)
      .def_readonly("samples", &CriterionReport::samples);
  py::class_<DynamicReport>(m, "DynamicReport")
      .def_readonly("worst_distance", &DynamicReport::worst_distance)
      .def_readonly("pass_", &DynamicReport::pass);
  py::class_<MarkovFlags>(m, "MarkovFlags")
      .def_readonly("real", &MarkovFlags::real)
      .def_readonly("positive", &MarkovFlags::positive)
      .def_readonly("sup_contractive", &MarkovFlags::sup_contractive)
      .def_readonly("l1_contractive", &MarkovFlags::l1_contractive)
      .def("all", &MarkovFlags::all);
  m.def("project", &project);
  m.def("projection_lift", &projection_lift);
  m.def("criterion_check", &criterion_check, py::arg("triple"), py::arg("set"),
        py::arg("lift"), py::arg("samples") = 1000, py::arg("seed") = 0);
  m.def("dynamic_invariance_check", &dynamic_invariance_check, py::arg("A"),
        py::arg("set"), py::arg("t_grid"), py::arg("samples") = 100,
        py::arg("seed") = 0, py::arg("tolerance") = 1e-9);
  m.def("markov_suite", &markov_suite, py::arg("A"), py::arg("weights"),
        py::arg("samples") = 60, py::arg("seed") = 0);

  py::class_<GridProblem>(m, "GridProblem")
      .def_static("interval", &make_interval, py::arg("length"),
                  py::arg("cells"), py::arg("coefficients"),
                  py::arg("bc") = "neumann", py::arg("beta") = RVec())
      .def_readonly("dim", &GridProblem::dim)
      .def("n_nodes", &GridProblem::n_nodes)
      .def("node_coordinates", &GridProblem::node_coordinates);
  py::class_<AssembledForm>(m, "AssembledForm")
      .def_readonly("triple", &AssembledForm::triple)
      .def_readonly("stiffness", &AssembledForm::stiffness)
      .def_readonly("lumped_mass", &AssembledForm::lumped_mass)
      .def_readonly("coordinates", &AssembledForm::coordinates)
      .def_readonly("theta", &AssembledForm::theta);
  py::class_<GaffneyReport>(m, "GaffneyReport")
      .def_readonly("t_values", &GaffneyReport::t_values)
      .def_readonly("lhs", &GaffneyReport::lhs)
      .def_readonly("bound", &GaffneyReport::bound)
      .def_readonly("ratios", &GaffneyReport::ratios)
      .def_readonly("M", &GaffneyReport::M)
      .def("pass_", &GaffneyReport::pass)
      .def("to_csv", &GaffneyReport::to_csv);
  py::class_<ConservationReport>(m, "ConservationReport")
      .def_readonly("worst_mass_drift", &ConservationReport::worst_mass_drift)
      .def_readonly("worst_ones_residual",
                    &ConservationReport::worst_ones_residual);
  m.def("assemble_form", &assemble_form);
  m.def("davies_gaffney_check", &davies_gaffney_check, py::arg("problem"),
        py::arg("omega1"), py::arg("omega2"), py::arg("t_grid"),
        py::arg("slack") = 1.25);
  m.def("conservation_check", &conservation_check);
  py::enum_<MultiplicativeMode>(m, "MultiplicativeMode")
      .value("m_delta_m", MultiplicativeMode::m_delta_m)
      .value("rho_delta", MultiplicativeMode::rho_delta)
      .value("delta_rho", MultiplicativeMode::delta_rho);
  m.def("multiplicative_ops", &multiplicative_ops);
  m.def("robin_trace_residual", &robin_trace_residual);

  py::class_<DtnProblem>(m, "DtnProblem")
      .def(py::init([](const GridProblem& grid, double lambda) {
             return DtnProblem{grid, lambda};
           }),
           py::arg("grid"), py::arg("lam"))
      .def_readonly("lambda_", &DtnProblem::lambda);
  py::class_<DtnResult>(m, "DtnResult")
      .def_readonly("op", &DtnResult::op)
      .def_readonly("schur", &DtnResult::schur)
      .def_readonly("cross_check", &DtnResult::cross_check);
  m.def("dtn_assemble", &dtn_assemble);
  m.def("dtn_oracle_interval", &dtn_oracle_interval, py::arg("lam"),
        py::arg("length"));
  m.def("interior_dirichlet_eigenvalues", &interior_dirichlet_eigenvalues);

  py::class_<WentzellProblem>(m, "WentzellProblem")
      .def(py::init([](const GridProblem& grid, const Vec& alpha, const Mat& B) {
             return WentzellProblem{grid, alpha, B, 1.0};
           }),
           py::arg("grid"), py::arg("alpha"), py::arg("B"));
  py::class_<WentzellResult>(m, "WentzellResult")
      .def_readonly("op", &WentzellResult::op)
      .def_readonly("char_residual", &WentzellResult::char_residual);
  py::class_<WentzellPositivity>(m, "WentzellPositivity")
      .def_readonly("lattice_homomorphism",
                    &WentzellPositivity::lattice_homomorphism)
      .def_readonly("dynamically_positive",
                    &WentzellPositivity::dynamically_positive)
      .def("agree", &WentzellPositivity::agree);
  py::class_<WentzellH1Report>(m, "WentzellH1Report")
      .def_readonly("A1", &WentzellH1Report::A1)
      .def_readonly("action_residual", &WentzellH1Report::action_residual)
      .def_readonly("boundary_residual", &WentzellH1Report::boundary_residual)
      .def_readonly("spectrum_gap", &WentzellH1Report::spectrum_gap);
  m.def("wentzell_assemble", &wentzell_assemble);
  m.def("wentzell_positivity_check", &wentzell_positivity_check,
        py::arg("problem"), py::arg("samples") = 40, py::arg("seed") = 0);
  m.def("wentzell_h1_realization", &wentzell_h1_realization);
}
