#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regkernel/dynamics.hpp"
#include "regkernel/error_analysis.hpp"
#include "regkernel/errors.hpp"
#include "regkernel/experiments.hpp"
#include "regkernel/kernel.hpp"

namespace py = pybind11;
using namespace regkernel;

namespace {

Dimension dim_arg(int d) { return make_dimension(d); }

KernelSpec spec_arg(int dim, std::optional<double> epsilon, int n) {
  return epsilon ? KernelSpec::regularized(dim_arg(dim), *epsilon, n) : KernelSpec::singular(dim_arg(dim));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularized Laplace kernels and symplectic N-body studies";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IntegrationBlowup>(m, "IntegrationBlowup", PyExc_FloatingPointError);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init(&spec_arg), py::arg("dim"), py::arg("epsilon") = py::none(), py::arg("n") = 0,
           "Regularized kernel, or the singular kernel when epsilon is None.")
      .def_property_readonly("dim", [](const KernelSpec& s) { return to_int(s.dim()); })
      .def_property_readonly("epsilon", &KernelSpec::epsilon)
      .def_property_readonly("n", &KernelSpec::order)
      .def_property_readonly("regularized", &KernelSpec::is_regularized)
      .def(py::self == py::self)
      .def("__repr__", [](const KernelSpec& s) {
        if (!s.is_regularized()) return "KernelSpec(dim=" + std::to_string(to_int(s.dim())) + ")";
        return "KernelSpec(dim=" + std::to_string(to_int(s.dim())) + ", epsilon=" + py::repr(py::float_(s.epsilon())).cast<std::string>() +
               ", n=" + std::to_string(s.order()) + ")";
      });

  m.def("green", [](int dim, double r) { return green(dim_arg(dim), r); }, py::arg("dim"), py::arg("r"));
  m.def("green_reg", &green_reg, py::arg("spec"), py::arg("r"));
  m.def("grad_green_reg", &grad_green_reg, py::arg("spec"), py::arg("r"));
  m.def("laplacian_reg_closed", &laplacian_reg_closed, py::arg("spec"), py::arg("r"));
  m.def("laplacian_reg_series", &laplacian_reg_series, py::arg("spec"), py::arg("r"));
  m.def("laplacian_mass", &laplacian_mass, py::arg("spec"), py::arg("r_max"));

  m.def("smoothing_error", &smoothing_error, py::arg("spec"), py::arg("radius") = 1.0);
  m.def("solve_epsilon_smoothing",
        [](int n, int dim, double target, double radius) { return solve_epsilon_smoothing(n, dim_arg(dim), target, radius); },
        py::arg("n"), py::arg("dim"), py::arg("target"), py::arg("radius") = 1.0);
  m.def("modelling_error",
        [](const KernelSpec& spec, const std::string& preset_name) {
          return modelling_error(spec, preset(preset_name).system);
        },
        py::arg("spec"), py::arg("preset"));
  m.def("solve_epsilon_modelling",
        [](int n, int dim, double target, const std::string& preset_name) {
          return solve_epsilon_modelling(n, dim_arg(dim), target, preset(preset_name).system);
        },
        py::arg("n"), py::arg("dim"), py::arg("target"), py::arg("preset"));
  m.def("tail_sum",
        [](int dim, int n, double z) { return tail_sum({dim_arg(dim), n, z}); },
        py::arg("dim"), py::arg("n"), py::arg("z"));
  m.def("hyp2f1", &hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));

  m.def("preset_names", &preset_names);
  m.def("smoothing_pairings", [](int dim) {
    std::vector<std::pair<int, double>> out;
    for (const auto& p : smoothing_pairings(dim_arg(dim))) out.emplace_back(p.n, p.epsilon);
    return out;
  }, py::arg("dim"));

  m.def("simulate",
        [](const KernelSpec& spec, const std::string& preset_name, double dt, std::optional<double> t_end) {
          const auto problem = preset(preset_name);
          const SimulationOptions options{.dt = dt, .t_end = t_end.value_or(problem.default_t), .record_every = 1,
                                          .observer = {}};
          const auto result = [&] {
            py::gil_scoped_release release;
            return simulate(spec, problem.system, options);
          }();
          py::dict out;
          out["t"] = result.trace.times;
          out["H_reg"] = result.trace.h_reg;
          out["time_stepping_error"] = result.trace.time_stepping_error();
          out["modelling_error"] = result.trace.modelling_error();
          out["total_error"] = result.trace.total_error();
          out["positions"] = std::vector<double>(result.final_state.positions().begin(), result.final_state.positions().end());
          return out;
        },
        py::arg("spec"), py::arg("preset"), py::arg("dt"), py::arg("T") = py::none());

  m.def("convergence_study",
        [](const std::string& preset_name, const std::vector<KernelSpec>& specs, const std::vector<double>& dts,
           double t_end) {
          const auto reports = [&] {
            py::gil_scoped_release release;
            return convergence_study(preset(preset_name), specs, dts, t_end);
          }();
          py::list out;
          for (const auto& r : reports) {
            py::dict d;
            d["spec"] = r.spec;
            d["dt"] = r.dt_values;
            d["max_H_error"] = r.max_h_error;
            d["fitted_order"] = r.fitted_order;
            d["plateau"] = r.plateau;
            d["fit_indices"] = r.fit_indices;
            out.append(d);
          }
          return out;
        },
        py::arg("preset"), py::arg("specs"), py::arg("dts"), py::arg("T"));

  m.def("orbit_metrics",
        [](const KernelSpec& spec, double dt) {
          const auto o = orbit_metrics(spec, dt);
          py::dict d;
          d["dt"] = o.dt;
          d["period_error"] = o.period_error;
          d["hamiltonian_error"] = o.hamiltonian_error;
          d["modelling_error"] = o.modelling_error;
          return d;
        },
        py::arg("spec"), py::arg("dt"));
}
