#include "abc_rods/abc.hpp"
#include "abc_rods/closest_point.hpp"
#include "abc_rods/scenario.hpp"
#include "abc_rods/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace abc_rods;

namespace {

py::dict report_dict(const StepReport& r) {
  py::dict d;
  d["step"] = r.step;
  d["t"] = r.t;
  d["e_kin"] = r.e_kin;
  d["e_int"] = r.e_int;
  d["pi_c"] = r.pi_c;
  d["w_con"] = r.w_con;
  d["linear_momentum"] = Eigen::Vector3d(r.linear_momentum);
  d["angular_momentum"] = Eigen::Vector3d(r.angular_momentum);
  d["n_point"] = r.n_point;
  d["n_line_gp"] = r.n_line_gp;
  d["n_endpoint"] = r.n_endpoint;
  d["n_fallback"] = r.n_fallback;
  d["alpha_min"] = r.alpha_min;
  d["alpha_max"] = r.alpha_max;
  d["newton_iterations"] = r.newton_iterations;
  d["min_gap"] = r.min_gap;
  d["contact_force"] = Eigen::Vector3d(r.contact_force);
  return d;
}

ElementDofs straight_element(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return ElementDofs::straight(a, b); }

}  // namespace

PYBIND11_MODULE(_abc_rods, m) {
  m.doc() = "Beam-to-beam contact for slender Kirchhoff rods.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def("override", [](Scenario& s, const std::string& kv) { apply_override(s, kv); }, py::arg("assignment"))
      .def("to_text", [](const Scenario& s) { return serialize_scenario(s); })
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; });

  m.def("builtin_scenarios", &builtin_scenarios);
  m.def("load_scenario", &load_scenario, py::arg("name_or_path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const Scenario& s) { return std::make_unique<Simulation>(s.build_model(), s.contact, s.solver); }),
           py::arg("scenario"))
      .def_property_readonly("t", [](const Simulation& s) { return s.state().t; })
      .def_property_readonly("dofs", [](const Simulation& s) { return Eigen::VectorXd(s.state().d); })
      .def_property_readonly("velocities", [](const Simulation& s) { return Eigen::VectorXd(s.state().v); })
      .def_property_readonly("newton_iterations", &Simulation::total_newton_iterations)
      .def("finished", &Simulation::finished)
      .def("step", [](Simulation& s) { return report_dict(s.step()); })
      .def(
          "run",
          [](Simulation& s) {
            {
              py::gil_scoped_release release;
              s.run();
            }
            py::list out;
            for (const auto& r : s.reports()) out.append(report_dict(r));
            return out;
          })
      .def("reports", [](const Simulation& s) {
        py::list out;
        for (const auto& r : s.reports()) out.append(report_dict(r));
        return out;
      });

  m.def(
      "closest_point",
      [](const Eigen::Vector3d& a1, const Eigen::Vector3d& b1, const Eigen::Vector3d& a2, const Eigen::Vector3d& b2,
         double radius) {
        ElementPair pair{straight_element(a1, b1), straight_element(a2, b2), radius, radius};
        const auto sol = bilateral_cpp(pair, 0.0, 0.0);
        py::dict d;
        d["xi"] = sol.xi;
        d["eta"] = sol.eta;
        d["gap"] = sol.gap;
        d["alpha_deg"] = sol.alpha_deg;
        d["converged"] = sol.converged();
        return d;
      },
      py::arg("a1"), py::arg("b1"), py::arg("a2"), py::arg("b2"), py::arg("radius"),
      "Closest points between two straight elements.");

  m.def("penalty_ratio", &penalty_ratio_analytic, py::arg("radius"), py::arg("alpha_bar_deg"),
        "eps_perp / eps_par for a linear law at the shifting angle.");
  m.def("min_gauss_points", &min_gauss_points, py::arg("g_n_min"), py::arg("alpha_max_deg"), py::arg("rho_slave"),
        py::arg("k_gp") = 1.0);
}
