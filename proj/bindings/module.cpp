#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hitchin/divisor.hpp"
#include "hitchin/fourdim.hpp"
#include "hitchin/gluing.hpp"
#include "hitchin/painleve.hpp"
#include "hitchin/specfun.hpp"
#include "hitchin/spectral.hpp"

namespace py = pybind11;
using namespace hitchin;

PYBIND11_MODULE(_core, m) {
  m.doc() = "asymptotic geometry of rank-two irregular Higgs-bundle moduli";

  // special functions
  m.def("bessel_k0", &bessel_k0, py::arg("x"));
  m.def("bessel_k1", &bessel_k1, py::arg("x"));
  m.def("log_bessel_k0", &log_bessel_k0, py::arg("x"));
  m.def("elliptic_K", &elliptic_K, py::arg("k"));
  m.def("modular_lambda", &modular_lambda, py::arg("tau"));
  m.def("inverse_modular_lambda", &inverse_modular_lambda, py::arg("l"));

  // polynomials and roots
  m.def(
      "find_roots",
      [](const std::vector<cplx>& coeffs) {
        return find_roots(ComplexPolynomial(coeffs));
      },
      py::arg("coeffs"), "complex roots of a polynomial given ascending coefficients");

  // divisor-level data
  py::enum_<PoleKind>(m, "PoleKind")
      .value("untwisted", PoleKind::untwisted)
      .value("twisted", PoleKind::twisted)
      .value("tame", PoleKind::tame);

  m.def("divisor_from_json", &divisor_from_json, py::arg("text"));
  m.def("divisor_to_json", &divisor_to_json, py::arg("divisor"));
  py::class_<IrregularDivisor>(m, "IrregularDivisor")
      .def("total_order", &IrregularDivisor::total_order)
      .def("pole_count", &IrregularDivisor::pole_count)
      .def("__repr__", [](const IrregularDivisor& d) {
        return "<IrregularDivisor N=" + std::to_string(d.total_order()) + ">";
      });
  m.def(
      "compute_sigma",
      [](const IrregularDivisor& d) {
        Sigma s = compute_sigma(d);
        return std::pair<long long, long long>(s.num, s.den);
      },
      py::arg("divisor"), "error-decay exponent as a (num, den) pair");
  m.def("stratum_dimension", &stratum_dimension, py::arg("divisor"), py::arg("m"));
  m.def("spectral_line_degree", &spectral_line_degree, py::arg("divisor"),
        py::arg("degE"));
  m.def("local_diagonal_data", &local_diagonal_data, py::arg("divisor"),
        py::arg("pole_index"));

  // fiducial profiles
  py::class_<FiducialProfile>(m, "FiducialProfile")
      .def_readonly("rho", &FiducialProfile::rho)
      .def_readonly("psi", &FiducialProfile::psi)
      .def_readonly("dpsi", &FiducialProfile::dpsi)
      .def_readonly("certified_residual", &FiducialProfile::certified_residual)
      .def_readonly("small_rho_constant", &FiducialProfile::small_rho_constant)
      .def("eval_psi", &FiducialProfile::eval_psi, py::arg("rho"))
      .def("to_csv", &FiducialProfile::to_csv);
  m.def("solve_psi1", [](double rho_min, double rho_max, int n) {
          return solve_psi1(rho_min, rho_max, n);
        },
        py::arg("rho_min") = kDefaultRhoMin, py::arg("rho_max") = kDefaultRhoMax,
        py::arg("n_points") = kDefaultProfilePoints);
  m.def("solve_psi2", [](double alpha1, double rho_min, double rho_max, int n) {
          return solve_psi2(alpha1, rho_min, rho_max, n);
        },
        py::arg("alpha1"), py::arg("rho_min") = kDefaultRhoMin,
        py::arg("rho_max") = kDefaultRhoMax,
        py::arg("n_points") = kDefaultProfilePoints);

  // four-dimensional case studies
  py::enum_<CaseId>(m, "CaseId")
      .value("U4", CaseId::U4)
      .value("T4", CaseId::T4)
      .value("U3S", CaseId::U3S)
      .value("T3S", CaseId::T3S)
      .value("U2U2", CaseId::U2U2)
      .value("U2T2", CaseId::U2T2)
      .value("T2T2", CaseId::T2T2)
      .value("U2SS", CaseId::U2SS)
      .value("T2SS", CaseId::T2SS);

  m.def("case_names", [] {
    std::vector<std::string> names;
    for (const auto& c : case_catalog()) names.push_back(c.name);
    return names;
  });
  m.def("case_by_name", [](const std::string& n) { return case_by_name(n); });
  m.def(
      "case_tilde_coeffs",
      [](CaseId id, cplx t, const MuMap& mus) { return case_tilde(id, t, mus).coeffs; },
      py::arg("case_id"), py::arg("t"), py::arg("mus") = MuMap{});
  m.def("fiber_cross_ratio", &fiber_cross_ratio, py::arg("case_id"), py::arg("t"),
        py::arg("mus"), py::arg("roots"));
  m.def("fiber_tau",
        [](CaseId id, cplx t, const MuMap& mus) { return fiber_tau(id, t, mus); },
        py::arg("case_id"), py::arg("t"), py::arg("mus") = MuMap{});
  m.def("tau_expansion_reference", &tau_expansion_reference, py::arg("case_id"),
        py::arg("t"), py::arg("mus") = MuMap{});
  m.def(
      "sk_metric_numeric",
      [](CaseId id, cplx t, const MuMap& mus, double rel_tol) {
        SkValue v = sk_metric_numeric(id, t, mus, rel_tol);
        return std::pair<double, double>(v.value, v.error_estimate);
      },
      py::arg("case_id"), py::arg("t"), py::arg("mus") = MuMap{},
      py::arg("rel_tol") = 1e-5, "returns (value, error_estimate)");
  m.def(
      "torus_pullback_metric",
      [](cplx tau, cplx tau_hat) {
        TorusMetric g = torus_pullback_metric(tau, tau_hat);
        return std::tuple<double, double, double>(g.m11, g.m12, g.m22);
      },
      py::arg("tau"), py::arg("tau_hat"));
  m.def("fiber_curve_check", &fiber_curve_check, py::arg("case_id"), py::arg("t"),
        py::arg("mus"), py::arg("a0"), py::arg("c0"));

  // gluing error
  m.def(
      "residual_decay_table",
      [](CaseId id, const MuMap& mus, std::vector<double> ts, double kappa) {
        BasePoint b0 = case_base_point(id, mus, ts.front());
        ProfileSet profiles = make_profiles(b0.divisor);
        std::vector<std::pair<double, double>> out;
        for (double t : ts) {
          ResidualReport rep =
              residual_l2_norm(case_base_point(id, mus, t), t, profiles, kappa);
          out.push_back({t, rep.log_total});
        }
        return out;
      },
      py::arg("case_id"), py::arg("mus"), py::arg("ts"), py::arg("kappa") = 0.3,
      "rows (t, log L2 norm of the gluing error)");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
