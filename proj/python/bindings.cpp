#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "padicaut/report.hpp"

namespace py = pybind11;
using namespace padicaut;

namespace {

FlowOptions options(int precision, int degree, int t_degree) {
  FlowOptions o;
  o.precision = precision;
  o.degree = degree;
  o.t_degree = t_degree;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-adic tools for polynomial automorphism groups";
  m.attr("__version__") = "0.1.0";

  py::register_exception<CertificateError>(m, "CertificateError");
  py::register_exception<PrecisionError>(m, "PrecisionError");
  py::register_exception<BudgetError>(m, "BudgetError");
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("bounds", [](int d, std::int64_t p, const std::string& field) {
    return bounds_json(d, p, FieldSpec::parse(field)).dump();
  }, py::arg("d"), py::arg("p"), py::arg("field") = "Q");

  m.def("prime_search", [](std::int64_t p, std::uint64_t lower) {
    return find_prime_generator(p, lower);
  }, py::arg("p"), py::arg("lower") = 1);

  m.def("optimal_group", [](int d, std::int64_t p, const std::string& field) {
    return optimal_group_json(optimal_group(d, p, FieldSpec::parse(field))).dump();
  }, py::arg("d"), py::arg("p"), py::arg("field") = "Q");

  m.def("linearize", [](const std::string& text, std::int64_t p) {
    return certificate_json(linearize_group(group_closure(parse_polymap_list(text)), p)).dump();
  }, py::arg("text"), py::arg("p"));

  m.def("flow", [](const std::string& text, std::int64_t p, int precision, int degree, int t_degree) {
    return flow_json(bell_poonen_flow(parse_polymap(text), p, options(precision, degree, t_degree))).dump();
  }, py::arg("text"), py::arg("p"), py::arg("precision") = 12, py::arg("degree") = 8, py::arg("t_degree") = 10);

  m.def("unitri_series", [](int n, const std::vector<std::string>& gens, const std::string& modulus) {
    const mpz_class mod(modulus);
    std::vector<UniTri> g;
    for (const auto& s : gens) g.push_back(UniTri::parse(n, s, mod));
    const SeriesReport r = derived_series_quotient(g, mod);
    Json j = {{"class", r.nilpotency_class}, {"dl", r.derived_length},
              {"derived_orders", r.derived_orders}, {"lower_central_orders", r.lower_central_orders}};
    return j.dump();
  }, py::arg("n"), py::arg("gens"), py::arg("modulus"));

  m.def("vdl_witness", [](int n) { return witness_json(faithfulness_and_vdl_witness(n)).dump(); }, py::arg("n"));

  m.def("theorem_b_exp_family", [](int n, std::int64_t p) {
    return theorem_b_json(theorem_b(exp_family_maps(n), p)).dump();
  }, py::arg("n"), py::arg("p") = 3);
}
