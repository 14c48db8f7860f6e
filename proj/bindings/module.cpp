// Python surface: the exact models, densities, step functions, and the main
// transforms/checks.  Words cross the boundary as strings in the model's
// letter alphabet; reports cross as small record classes.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyplab/boundary.hpp"
#include "hyplab/boundary_rep.hpp"
#include "hyplab/decay.hpp"
#include "hyplab/density.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/fatou.hpp"
#include "hyplab/group.hpp"
#include "hyplab/poisson.hpp"
#include "hyplab/step_function.hpp"

namespace py = pybind11;
using namespace hyplab;

namespace {

Element el(const ConformalDensity& mu, const std::string& w) {
  return Element{mu.key(), mu.model().word_parse(w)};
}

}  // namespace

PYBIND11_MODULE(_hyplab, mod) {
  mod.doc() = "exact boundary harmonic analysis on free groups and free products";

  py::register_exception<Error>(mod, "Error");

  py::class_<GroupModel>(mod, "Group")
      .def_static("free_group", &GroupModel::free_group, py::arg("k"))
      .def_static("cyclic_free_product", &GroupModel::cyclic_free_product, py::arg("p"),
                  py::arg("q"))
      .def_static("parse", &GroupModel::parse, py::arg("name"))
      .def_property_readonly("name", [](const GroupModel& m) { return m.name(); })
      .def_property_readonly("delta", &GroupModel::delta)
      .def_property_readonly("alphabet_size", &GroupModel::alphabet_size)
      .def("ball_count", &GroupModel::ball_count, py::arg("n"))
      .def("annulus_count", &GroupModel::annulus_count, py::arg("n"), py::arg("rho"))
      .def("annulus",
           [](const GroupModel& m, int n, double rho, double cap) {
             std::vector<std::string> out;
             for (const Word& w : m.annulus(n, rho, cap)) out.push_back(m.word_str(w));
             return out;
           },
           py::arg("n"), py::arg("rho") = 0.0, py::arg("cap") = 2e6)
      .def("word_length",
           [](const GroupModel& m, const std::string& w) { return m.word_parse(w).size(); },
           py::arg("word"))
      .def("constant", [](const GroupModel& m, Complex v) { return StepFunction::constant(m, v); },
           py::arg("value"))
      .def("indicator",
           [](const GroupModel& m, const std::string& w, Complex inside) {
             return StepFunction::indicator(m, m.word_parse(w), inside);
           },
           py::arg("cylinder"), py::arg("value") = Complex{1.0, 0.0})
      .def("add", [](const GroupModel& m, const StepFunction& f,
                     const StepFunction& g) { return operator_add(m, f, g); })
      .def("canonical_direction",
           [](const GroupModel& m, const std::string& w) {
             return canonical_direction(m, m.word_parse(w));
           },
           py::arg("prefix"))
      .def("periodic_direction",
           [](const GroupModel& m, const std::string& w) {
             return periodic_direction(m, {}, m.word_parse(w));
           },
           py::arg("period"))
      .def("__repr__", [](const GroupModel& m) { return "Group(" + m.name() + ")"; });

  py::class_<Direction>(mod, "Direction");

  py::class_<StepFunction>(mod, "StepFunction")
      .def_property_readonly("resolution", &StepFunction::resolution)
      .def_property_readonly("sup_norm", &StepFunction::sup_norm)
      .def("value_at", [](const StepFunction& f, const Direction& v) { return f.value_at(v); },
           py::arg("direction"))
      .def("scaled",
           [](const StepFunction& f, Complex c) { return f.map([c](Complex v) { return v * c; }); },
           py::arg("factor"));

  py::class_<ConformalityReport>(mod, "ConformalityReport")
      .def_readonly("c_q", &ConformalityReport::c_q)
      .def_readonly("worst_ratio", &ConformalityReport::worst_ratio);

  py::class_<AhlforsReport>(mod, "AhlforsReport")
      .def_readonly("dimension_d", &AhlforsReport::dimension_d)
      .def_readonly("k", &AhlforsReport::k);

  py::class_<ConformalDensity>(mod, "Density")
      .def_static("exact", &ConformalDensity::exact, py::arg("group"))
      .def_static("orbit", &ConformalDensity::orbit, py::arg("group"), py::arg("s"),
                  py::arg("ball_radius"), py::arg("depth"), py::arg("cap") = 1e7)
      .def_property_readonly("dimension", &ConformalDensity::dimension)
      .def_property_readonly("resolution", &ConformalDensity::resolution)
      .def("mass",
           [](const ConformalDensity& mu, const std::string& basepoint, const std::string& cyl) {
             return mu.mass(mu.model().word_parse(basepoint), mu.model().word_parse(cyl));
           },
           py::arg("basepoint"), py::arg("cylinder"))
      .def("mass_e",
           [](const ConformalDensity& mu, const std::string& cyl) {
             return mu.mass_e(mu.model().word_parse(cyl));
           },
           py::arg("cylinder"))
      .def("measure_conformality", &ConformalDensity::measure_conformality, py::arg("depth"))
      .def("certify_ahlfors_regularity",
           [](const ConformalDensity& mu, int depth) {
             return mu.certify_ahlfors_regularity(VisualMetricParams::standard(mu.model()), depth);
           },
           py::arg("depth"));

  mod.def("busemann",
          [](const GroupModel& m, const Direction& v, const std::string& x, const std::string& y) {
            return busemann(m, v, m.word_parse(x), m.word_parse(y)).value();
          },
          py::arg("group"), py::arg("direction"), py::arg("x"), py::arg("y"));

  mod.def("harish_chandra",
          [](const ConformalDensity& mu, const std::string& y) {
            return harish_chandra(mu, el(mu, y));
          },
          py::arg("mu"), py::arg("y"));
  mod.def("harish_chandra_radial", &harish_chandra_radial, py::arg("mu"), py::arg("n"));

  mod.def("normalized_poisson",
          [](const ConformalDensity& mu, const StepFunction& f, const std::string& y) {
            return normalized_poisson(mu, f, el(mu, y));
          },
          py::arg("mu"), py::arg("f"), py::arg("y"));

  mod.def("l2_norm",
          [](const ConformalDensity& mu, const StepFunction& f) { return l2_norm(mu, f); },
          py::arg("mu"), py::arg("f"));

  py::class_<FatouTrace::Envelope>(mod, "FatouEnvelope")
      .def_readonly("n", &FatouTrace::Envelope::n)
      .def_readonly("max_error", &FatouTrace::Envelope::max_error)
      .def_readonly("members", &FatouTrace::Envelope::members);
  py::class_<FatouTrace>(mod, "FatouTrace")
      .def_readonly("envelope", &FatouTrace::envelope)
      .def_readonly("target_value", &FatouTrace::target_value)
      .def_readonly("final_error", &FatouTrace::final_error)
      .def_readonly("decayed", &FatouTrace::decayed);
  mod.def("fatou_experiment",
          [](const ConformalDensity& mu, const StepFunction& f, const Direction& v,
             double aperture, int n_lo, int n_hi, double tolerance) {
            return fatou_experiment(mu, f, v, aperture, n_lo, n_hi, tolerance);
          },
          py::arg("mu"), py::arg("f"), py::arg("target"), py::arg("aperture") = 1.0,
          py::arg("n_lo") = 1, py::arg("n_hi") = 12, py::arg("tolerance") = 1e-3);

  py::class_<AnnulusAverage>(mod, "AnnulusAverage")
      .def_readonly("n", &AnnulusAverage::n)
      .def_readonly("rho", &AnnulusAverage::rho)
      .def_readonly("count", &AnnulusAverage::count)
      .def_readonly("sup_norm", &AnnulusAverage::sup_norm)
      .def_readonly("average", &AnnulusAverage::average);
  mod.def("annulus_average",
          [](const ConformalDensity& mu, int n, double rho) { return annulus_average(mu, n, rho); },
          py::arg("mu"), py::arg("n"), py::arg("rho") = 1.0);

  py::class_<RdSumReport::Row>(mod, "RdSumRow")
      .def_readonly("n", &RdSumReport::Row::n)
      .def_readonly("cumulative", &RdSumReport::Row::cumulative)
      .def_readonly("bound", &RdSumReport::Row::bound)
      .def_readonly("certified", &RdSumReport::Row::certified);
  py::class_<RdSumReport>(mod, "RdSumReport")
      .def_readonly("rows", &RdSumReport::rows)
      .def_readonly("uniform_bound", &RdSumReport::uniform_bound)
      .def_readonly("sup_ratio_cubic", &RdSumReport::sup_ratio_cubic)
      .def_readonly("all_certified", &RdSumReport::all_certified);
  mod.def("rd_sum",
          [](const ConformalDensity& mu, const StepFunction& xi, int n_max) {
            return rd_sum(mu, xi, n_max);
          },
          py::arg("mu"), py::arg("xi"), py::arg("n_max"));

  py::class_<CsPoissonReport>(mod, "CsPoissonReport")
      .def_readonly("lhs", &CsPoissonReport::lhs)
      .def_readonly("rhs", &CsPoissonReport::rhs)
      .def_readonly("slack", &CsPoissonReport::slack)
      .def_readonly("phi", &CsPoissonReport::phi)
      .def_readonly("holds", &CsPoissonReport::holds);
  mod.def("check_cs_poisson",
          [](const ConformalDensity& mu, const std::string& g, const StepFunction& xi,
             const StepFunction& eta) {
            return check_cs_poisson(mu, mu.model().word_parse(g), xi, eta);
          },
          py::arg("mu"), py::arg("g"), py::arg("xi"), py::arg("eta"));
}
