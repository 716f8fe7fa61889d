#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "magweyl/audit.hpp"

namespace py = pybind11;
using namespace magweyl;

namespace {

HullPoint omega_at(const RunConfig& c, std::size_t index) {
  OmegaGrid g = c.omega();
  if (index >= g.size()) throw InputError("omega index outside the omega grid");
  return g.point(index);
}

// [omega][x] complex array with the space axes unfolded.
py::array_t<cplx> to_array(const Sampled& s) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(s.omega.size())};
  for (int a = 0; a < s.grid.n; ++a) shape.push_back(s.grid.N);
  py::array_t<cplx> out(shape);
  std::copy(s.values.begin(), s.values.end(), out.mutable_data());
  return out;
}

py::dict grid_dict(const GridSpec& g) {
  py::dict d;
  d["L"] = g.L;
  d["N"] = g.N;
  d["n"] = g.n;
  d["h"] = g.h();
  d["realization"] = g.tag == Realization::X ? "X" : "XStar";
  return d;
}

}  // namespace

PYBIND11_MODULE(_magweyl, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<RunConfig>(m, "Config")
      .def_static("from_json", [](const std::string& text) { return config_from_json(json::parse(text)); })
      .def("to_json", [](const RunConfig& c) { return to_json(c).dump(); })
      .def_property_readonly("hash", [](const RunConfig& c) { return hash_hex(config_hash(c)); })
      .def_readonly("hbar_list", &RunConfig::hbar_list)
      .def_readonly("pair", &RunConfig::pair)
      .def_readonly("seed", &RunConfig::seed)
      .def_property_readonly("grid", [](const RunConfig& c) { return grid_dict(c.space_grid()); })
      .def_property_readonly("omega_points", [](const RunConfig& c) { return c.omega().size(); });

  m.def("validate_field", [](const RunConfig& c) {
    FieldValidation v = validate_field(c.field);
    py::dict d;
    d["antisymmetric"] = v.antisymmetric;
    d["real"] = v.real;
    d["closed"] = v.closed;
    d["closedness_defect"] = v.closedness_defect;
    return d;
  });

  m.def(
      "triangle_flux",
      [](const RunConfig& c, const Vec& a, const Vec& b, const Vec& cc, const std::vector<double>& omega) {
        return triangle_flux(c.field, a, b, cc).evaluate(HullPoint{omega}).real();
      },
      py::arg("config"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("omega"));
  m.def(
      "triangle_flux_oracle",
      [](const RunConfig& c, const Vec& a, const Vec& b, const Vec& cc, const std::vector<double>& omega) {
        return triangle_flux_oracle(c.field, HullPoint{omega}, a, b, cc);
      },
      py::arg("config"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("omega"));
  m.def(
      "cocycle",
      [](const RunConfig& c, double hbar, const Vec& x, const Vec& y, const std::vector<double>& omega) {
        return cocycle(c.field, hbar, HullPoint{omega}, x, y);
      },
      py::arg("config"), py::arg("hbar"), py::arg("x"), py::arg("y"), py::arg("omega"));
  m.def(
      "cocycle_identity_defect",
      [](const RunConfig& c, double hbar, const Vec& x, const Vec& y, const Vec& z, int per_axis) {
        return cocycle_identity_defect(c.field, hbar, x, y, z, OmegaGrid::uniform(c.model.d, per_axis)).defect;
      },
      py::arg("config"), py::arg("hbar"), py::arg("x"), py::arg("y"), py::arg("z"), py::arg("per_axis") = 16);

  m.def(
      "compose",
      [](const RunConfig& c, double hbar) {
        py::gil_scoped_release release;
        Sampled s = compose_magnetic(c.field, hbar, c.first(), c.second(), c.space_grid(), c.omega());
        py::gil_scoped_acquire acquire;
        return to_array(s);
      },
      py::arg("config"), py::arg("hbar"));
  m.def(
      "compose_zero",
      [](const RunConfig& c) { return to_array(compose_zero(c.model, c.first(), c.second(), c.space_grid(), c.omega())); },
      py::arg("config"));
  m.def(
      "expand",
      [](const RunConfig& c, double hbar) {
        ExpansionReport e = expansion_remainder(c.field, hbar, c.first(), c.second(), c.space_grid(), c.omega());
        py::dict d;
        d["hbar"] = e.hbar;
        d["product_norm"] = e.product_norm;
        d["first_order_norm"] = e.first_order_norm;
        d["second_order_norm"] = e.second_order_norm;
        d["remainder_norm"] = e.remainder_norm;
        d["tolerance"] = e.tolerance;
        d["reliable"] = e.reliable;
        return d;
      },
      py::arg("config"), py::arg("hbar"));

  m.def(
      "rep_matrix",
      [](const RunConfig& c, double hbar, std::size_t omega_index) {
        return rep_matrix(c.field, hbar, omega_at(c, omega_index), c.first(), c.space_grid()).M;
      },
      py::arg("config"), py::arg("hbar"), py::arg("omega_index") = 0);
  m.def(
      "morphism_defect",
      [](const RunConfig& c, double hbar, std::size_t omega_index) {
        return morphism_defect(c.field, hbar, omega_at(c, omega_index), c.first(), c.second(), c.space_grid());
      },
      py::arg("config"), py::arg("hbar"), py::arg("omega_index") = 0);
  m.def("spectral_norm", [](const Eigen::MatrixXcd& M) { return spectral_norm(M); }, py::arg("matrix"));

  m.def(
      "slope_fit",
      [](const std::vector<double>& values, const std::vector<double>& hbars) {
        SlopeFit f = slope_fit(values, hbars);
        return py::make_tuple(f.slope, f.residual);
      },
      py::arg("values"), py::arg("hbars"));
  m.def(
      "audit",
      [](const RunConfig& c) {
        AuditReport r;
        {
          py::gil_scoped_release release;
          r = audit_report(c);
        }
        return py::make_tuple(r.document.dump(), r.csv(), r.pass());
      },
      py::arg("config"));
}
