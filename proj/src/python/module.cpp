#include "skl/chebyshev.hpp"
#include "skl/harness.hpp"
#include "skl/hyperbolic_kernel.hpp"
#include "skl/quasimode.hpp"
#include "skl/selberg.hpp"
#include "skl/tree_kernel.hpp"
#include "skl/wave.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

namespace py = pybind11;

namespace {

skl::SpectralParameter parameter(double value, bool imaginary) { return {value, imaginary}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral kernel laboratory bindings";

    py::register_exception<skl::Error>(m, "SklError", PyExc_RuntimeError);

    m.def("fejer", &skl::fejer, py::arg("order"), py::arg("x"));
    m.def("chebyshev_first", [](int n, double x) { return skl::cheb_eval(skl::ChebKind::First, n, x); });

    m.def("propagation_closed_form",
          [](long p, int n) {
              return skl::to_json(skl::propagate_closed_form(p, n, n)).dump();
          },
          py::arg("p"), py::arg("n"), "P_n(T_p/2) delta_0 as a JSON radial function");

    m.def("design_tree_kernel",
          [](long p, double eta, int N, double theta0) {
              const auto d = skl::design_kernel(p, eta, N, theta0);
              nlohmann::json j = skl::to_json(d);
              j["report"] = skl::to_json(skl::verify_design(d), eta);
              return j.dump();
          },
          py::arg("p"), py::arg("eta"), py::arg("N"), py::arg("theta0"),
          "Designed tree kernel and its property report as JSON");

    m.def("tree_transform",
          [](long p, double eta, int N, double theta0, const std::vector<double>& thetas) {
              const auto d = skl::design_kernel(p, eta, N, theta0);
              const skl::SphericalTransform h(d.kernel);
              std::vector<double> out;
              for (double t : thetas) out.push_back(h(skl::SpectralPoint::tempered(t)));
              return out;
          },
          py::arg("p"), py::arg("eta"), py::arg("N"), py::arg("theta0"), py::arg("thetas"));

    m.def("profile_h", [](double T, double r, bool imaginary) { return skl::profile_h(T, parameter(r, imaginary)); },
          py::arg("T"), py::arg("r"), py::arg("imaginary") = false);
    m.def("profile_q", &skl::profile_q, py::arg("T"), py::arg("omega"));
    m.def("kernel_k", [](double T, double t) { return skl::kernel_k(T, t).value; }, py::arg("T"), py::arg("t"));
    m.def("fourier_h",
          [](double T, double r, double tol) {
              return skl::fourier_h(skl::selberg_profile(T), skl::SpectralParameter::real(r), tol).value;
          },
          py::arg("T"), py::arg("r"), py::arg("tol") = 1e-9);
    m.def("truncated_transform",
          [](double T, double r, bool imaginary) { return skl::TruncatedTransform(T).value(parameter(r, imaginary)); },
          py::arg("T"), py::arg("r"), py::arg("imaginary") = false);

    m.def("laplace_defect",
          [](const std::vector<std::pair<double, double>>& comps, double r) {
              std::vector<skl::Component> c;
              for (const auto& [a, b] : comps) c.push_back({a, b});
              return skl::laplace_defect(skl::SpectralDecomposition::laplace(std::move(c)), r);
          },
          py::arg("components"), py::arg("r"));
    m.def("projection_bound",
          [](const std::vector<std::pair<double, double>>& comps, double r, double omega) {
              std::vector<skl::Component> c;
              for (const auto& [a, b] : comps) c.push_back({a, b});
              return skl::to_json(skl::verify_projection_bound(skl::SpectralDecomposition::laplace(std::move(c)), r, omega))
                  .dump();
          },
          py::arg("components"), py::arg("r"), py::arg("omega"));

    m.def("run_command",
          [](const std::string& config_json) {
              auto config = skl::with_defaults(skl::config_from_json(nlohmann::json::parse(config_json)));
              skl::CommandResult r;
              {
                  py::gil_scoped_release release;
                  r = skl::run_command(config);
              }
              return py::make_tuple(r.report.dump(), r.pass, r.csv);
          },
          py::arg("config_json"), "Run a harness command; returns (report JSON, pass, CSV)");
}
